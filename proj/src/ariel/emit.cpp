#include <cstdio>

#include "ariel/compile.h"
#include "rcode/listing.h"
#include "rcode/serialize.h"

namespace ariel {

namespace {

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Artifacts emit_artifacts(const std::string& stem, const rcode::Program& program,
                         const ConfigBundle& config, bool listing) {
  Artifacts out;

  std::vector<uint8_t> bytes = rcode::serialize(program);
  out.emplace_back(stem + ".rcode", std::string(bytes.begin(), bytes.end()));

  if (listing) out.emplace_back(stem + ".lst", rcode::render_listing(program));

  std::string logicals = "group_id,name,members\n";
  for (const auto& g : config.groups) {
    logicals += std::to_string(g.unique_id) + "," + g.name + ",";
    for (size_t i = 0; i < g.members.size(); ++i) {
      if (i) logicals += ';';
      logicals += std::to_string(g.members[i]);
    }
    logicals += '\n';
  }
  out.emplace_back("LogicalTable.csv", std::move(logicals));

  std::string tasks = "unique_id,name,node,local_id\n";
  for (const auto& t : config.tasks)
    tasks += std::to_string(t.unique_id) + "," + t.name + "," + std::to_string(t.node) + "," +
             std::to_string(t.local_id) + "\n";
  out.emplace_back("TaskTable.csv", std::move(tasks));

  if (!config.alphacounts.empty()) {
    std::string alphas = "task,threshold,factor\n";
    for (const auto& [id, params] : config.alphacounts)
      alphas += std::to_string(id) + "," + fmt_real(params.first) + "," +
                fmt_real(params.second) + "\n";
    out.emplace_back("AlphaTable.csv", std::move(alphas));
  }

  if (!config.timeouts.empty()) {
    std::string touts = "name,ticks\n";
    for (const auto& [name, value] : config.timeouts)
      touts += name + "," + std::to_string(value) + "\n";
    out.emplace_back("Timeouts.csv", std::move(touts));
  }

  return out;
}

}  // namespace ariel
