#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ariel/compile.h"

namespace ariel {

namespace {

std::string stem_of(const std::string& filename) {
  return std::filesystem::path(filename).stem().string();
}

std::string artifact_line(const std::string& name) {
  if (name.size() > 6 && name.rfind(".rcode") == name.size() - 6)
    return "Output written in file " + name + ".";
  if (name.size() > 4 && name.rfind(".lst") == name.size() - 4)
    return "Listing written in file " + name + ".";
  if (name == "LogicalTable.csv") return "Logicals written in file " + name + ".";
  if (name == "TaskTable.csv") return "Tasks written in file " + name + ".";
  if (name == "AlphaTable.csv") return "Alpha-counts written in file " + name + ".";
  return "Timeouts written in file " + name + ".";
}

}  // namespace

CompileResult compile_source(const std::string& source, const std::string& filename,
                             const CompileOptions& opt, const FileLoader& loader) {
  std::clock_t t0 = std::clock();
  CompileResult out;

  LexResult lexed = lex(source, loader, opt.verbose);
  ParseResult parsed = parse(lexed.tokens, filename);
  SemaResult sema = check_semantics(parsed.script);
  out.errors = lexed.errors + parsed.errors + sema.errors;
  out.config = std::move(sema.config);

  std::vector<LexEvent> events;
  events.reserve(lexed.events.size() + parsed.events.size() + sema.events.size());
  for (auto& e : lexed.events) events.push_back(std::move(e));
  for (auto& e : parsed.events) events.push_back(std::move(e));
  for (auto& e : sema.events) events.push_back(std::move(e));
  std::stable_sort(events.begin(), events.end(),
                   [](const LexEvent& a, const LexEvent& b) {
                     if (a.line != b.line) return a.line < b.line;
                     return a.phase < b.phase;
                   });

  std::ostringstream ts;
  ts << "Parsing file " << filename << "...\n";
  for (const LexEvent& e : events) ts << e.text << "\n";

  if (out.errors > 0) {
    ts << "...done (" << lexed.source_lines << " lines.)\n";
    ts << out.errors << (out.errors == 1 ? " error" : " errors")
       << " detected --- output rejected.\n";
    out.transcript = ts.str();
    return out;
  }

  out.program = translate(parsed.script, out.config);
  out.artifacts = emit_artifacts(stem_of(filename), out.program, out.config, opt.listing);

  double cpu = static_cast<double>(std::clock() - t0) / CLOCKS_PER_SEC;
  if (cpu < 0.01) cpu = 0.01;
  char done[128];
  std::snprintf(done, sizeof done, "...done (%d lines in %.2f CPU secs, or %.3f lines per CPU sec.)",
                lexed.source_lines, cpu, lexed.source_lines / cpu);
  ts << done << "\n";
  for (const auto& [name, bytes] : out.artifacts) ts << artifact_line(name) << "\n";

  out.ok = true;
  out.transcript = ts.str();
  return out;
}

CompileResult compile_file(const std::string& path, const CompileOptions& opt,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::ifstream in(path, std::ios::binary);
  CompileResult failed;
  if (!in) {
    failed.errors = 1;
    failed.transcript = "cannot open file " + path + "\n";
    return failed;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  fs::path dir = fs::path(path).parent_path();
  FileLoader loader = [dir](const std::string& name) -> std::optional<std::string> {
    std::ifstream f(dir / name, std::ios::binary);
    if (!f) return std::nullopt;
    std::ostringstream b;
    b << f.rdbuf();
    return b.str();
  };

  CompileResult result =
      compile_source(buf.str(), fs::path(path).filename().string(), opt, loader);
  if (!result.ok) return result;

  fs::path target = out_dir.empty() ? (dir.empty() ? fs::path(".") : dir) : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(target, ec);
  for (const auto& [name, bytes] : result.artifacts) {
    std::ofstream f(target / name, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  return result;
}

}  // namespace ariel
