#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ariel/ast.h"
#include "ariel/lexer.h"
#include "ariel/parser.h"
#include "rcode/ops.h"

namespace ariel {

struct SemaResult {
  ConfigBundle config;
  std::vector<LexEvent> events;
  int errors = 0;
};

SemaResult check_semantics(const Script& script);

// requires a semantically clean script
rcode::Program translate(const Script& script, const ConfigBundle& config);

// artifact name -> bytes, in write order
using Artifacts = std::vector<std::pair<std::string, std::string>>;
Artifacts emit_artifacts(const std::string& stem, const rcode::Program& program,
                         const ConfigBundle& config, bool listing);

struct CompileOptions {
  bool verbose = false;
  bool listing = false;
};

struct CompileResult {
  bool ok = false;
  int errors = 0;
  rcode::Program program;
  ConfigBundle config;
  std::string transcript;
  Artifacts artifacts;
};

CompileResult compile_source(const std::string& source, const std::string& filename,
                             const CompileOptions& opt, const FileLoader& loader);

// loads includes next to the script; writes artifacts into out_dir (the
// script's directory when empty)
CompileResult compile_file(const std::string& path, const CompileOptions& opt,
                           const std::string& out_dir);

}  // namespace ariel
