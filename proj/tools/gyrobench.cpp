// Command-line front end: catalog inspection, harness runs, and report
// generation over timing records.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gyrobench.hpp"

namespace {

using namespace gyrobench;

std::string grid_str(const GridShape& g) {
  std::ostringstream os;
  const auto dims = g.dims();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << " x ";
    os << dims[i];
  }
  return os.str();
}

std::string collision_str(const CollisionMode& mode) {
  if (mode.kind == CollisionKind::Simplified) return "simplified (diagonal)";
  return "full, " + std::to_string(mode.entry_bytes) + "-byte entries";
}

int cmd_list() {
  for (const auto& input : catalog()) {
    const FftShape f = derive_fft_shape(input.grid);
    std::printf("%-8s %-34s total %-12" PRIu64 " fft (%" PRId64 " x %" PRId64
                ") batch %" PRId64 "\n",
                input.name.c_str(), grid_str(input.grid).c_str(), input.grid.total(),
                f.fft_x, f.fft_y, f.batch);
  }
  return 0;
}

int cmd_describe(const std::string& name, const std::string& scale_text) {
  auto found = find_input(name);
  if (!found) throw DataError("unknown input '" + name + "'; see `gyrobench list`");
  BenchmarkInput input = *found;
  const Rational scale = Rational::parse(scale_text);
  if (!scale.is_one()) input = scale_input(input, scale);

  const FftShape f = derive_fft_shape(input.grid);
  const std::uint64_t mem = estimate_collision_memory(input.grid, input.collision);
  std::printf("input:       %s\n", input.name.c_str());
  if (!input.scale.is_one()) std::printf("scale:       %s\n", input.scale.str().c_str());
  std::printf("grid:        %s\n", grid_str(input.grid).c_str());
  std::printf("grid total:  %" PRIu64 "\n", input.grid.total());
  std::printf("fft:         (%" PRId64 " x %" PRId64 ")\n", f.fft_x, f.fft_y);
  std::printf("fft batch:   %" PRId64 "\n", f.batch);
  std::printf("collision:   %s\n", collision_str(input.collision).c_str());
  std::printf("memory:      %s%s\n", format_gib(mem).c_str(),
              input.collision.kind == CollisionKind::Simplified
                  ? " (no materialized collision data)"
                  : " (materialized collision data)");
  return 0;
}

struct RunOptions {
  std::string input;
  std::string scale = "1";
  int steps = 10;
  int reports = 1;
  std::string semantics = "natural";
  int workers = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_run(const RunOptions& opt) {
  auto found = find_input(opt.input);
  if (!found) throw DataError("unknown input '" + opt.input + "'; see `gyrobench list`");
  BenchmarkInput input = *found;
  const Rational scale = Rational::parse(opt.scale);
  if (!scale.is_one()) input = scale_input(input, scale);

  harness::RunConfig config;
  config.input = input;
  config.steps_per_report = opt.steps;
  config.reports = opt.reports;
  if (opt.semantics == "natural") {
    config.semantics = fft::BackendSemantics::natural();
  } else if (opt.semantics == "reversed") {
    config.semantics = fft::BackendSemantics::reversed();
  } else {
    throw DataError("unknown semantics '" + opt.semantics + "' (natural, reversed)");
  }
  config.workers = opt.workers;
  config.seed = opt.seed;
  config.out_path = opt.out;

  std::printf("run %s scale=%s steps=%d reports=%d workers=%d semantics=%s seed=%" PRIu64
              "\n",
              input.name.c_str(), input.scale.str().c_str(), config.steps_per_report,
              config.reports, config.workers, opt.semantics.c_str(), config.seed);

  const harness::RunResult result = harness::run(config);
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& t = result.reports[i];
    std::printf("report %zu:", i + 1);
    for (int s = 0; s < 8; ++s)
      std::printf(" %s=%.3f", harness::kSectionNames[std::size_t(s)],
                  t[harness::Section(s)]);
    std::printf(" total=%.3f\n", t.total());
  }
  std::printf("checksum: %.17g\n", result.final_checksum);
  if (!opt.out.empty())
    std::printf("wrote %zu record(s) to %s\n", result.reports.size(), opt.out.c_str());
  return 0;
}

struct ReportOptions {
  std::vector<std::string> data = {"bundled"};
  std::string input;
  std::string sections = "nl";
  std::string baseline = "a100-80g";
  std::string norm = "per_xpu";
  std::string format = "text";
  std::string out;
};

std::vector<report::TimingRecord> gather_records(const std::vector<std::string>& data) {
  std::vector<report::TimingRecord> records;
  for (const auto& token : data) {
    if (token == "bundled") {
      auto bundled = report::bundled_dataset();
      records.insert(records.end(), bundled.begin(), bundled.end());
    } else {
      auto ingested = report::ingest({std::filesystem::path(token)});
      records.insert(records.end(), ingested.begin(), ingested.end());
    }
  }
  return records;
}

int cmd_report(const ReportOptions& opt) {
  auto records = gather_records(opt.data);
  if (!opt.input.empty()) {
    std::erase_if(records, [&](const auto& r) { return r.input != opt.input; });
    if (records.empty())
      throw DataError("no records for input '" + opt.input + "' in the given data");
  }

  const report::SectionSet set = report::SectionSet::parse(opt.sections);
  const report::Norm norm = report::parse_norm(opt.norm);
  const report::Figure fig = report::make_figure(records, set, opt.baseline, norm);
  const report::Format format = report::parse_format(opt.format);

  if (opt.out.empty()) {
    report::emit(fig, format, std::cout);
  } else {
    report::emit(fig, format, std::filesystem::path(opt.out));
    std::printf("wrote %s report to %s\n", opt.format.c_str(), opt.out.c_str());
  }
  return 0;
}

int cmd_validate(const std::vector<std::string>& data) {
  for (const auto& token : data) {
    std::ifstream in(token);
    if (!in) throw IoError("cannot open data file", token);
    const auto records = report::ingest(in, token);
    std::printf("%s: ok, %zu record(s)\n", token.c_str(), records.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CGYRO-style FFT benchmark harness and timing report tool"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "print the input catalog");

  auto* describe_cmd =
      app.add_subcommand("describe", "print grid, FFT shape and memory needs of an input");
  std::string describe_input;
  std::string describe_scale = "1";
  describe_cmd->add_option("input", describe_input, "catalog input name")->required();
  describe_cmd->add_option("--scale", describe_scale, "rational shrink factor, e.g. 1/8");

  auto* run_cmd = app.add_subcommand("run", "execute the timed step loop");
  RunOptions run_opt;
  run_cmd->add_option("--input", run_opt.input, "catalog input name")->required();
  run_cmd->add_option("--scale", run_opt.scale, "rational shrink factor, e.g. 1/8");
  run_cmd->add_option("--steps", run_opt.steps, "steps per reporting step (default 10)");
  run_cmd->add_option("--reports", run_opt.reports, "number of reporting steps");
  run_cmd->add_option("--semantics", run_opt.semantics, "plan semantics: natural|reversed");
  run_cmd->add_option("--workers", run_opt.workers, "worker count (must divide the batch)");
  run_cmd->add_option("--seed", run_opt.seed, "state seed");
  run_cmd->add_option("--out", run_opt.out, "timing record output file");

  auto* report_cmd = app.add_subcommand("report", "relative-performance tables and charts");
  ReportOptions report_opt;
  report_cmd->add_option("--data", report_opt.data,
                         "'bundled' or record files (repeatable; default bundled)");
  report_cmd->add_option("--input", report_opt.input, "restrict to one input");
  report_cmd->add_option("--sections", report_opt.sections,
                         "builtin set (nl, maintained, memory, all) or comma list");
  report_cmd->add_option("--baseline", report_opt.baseline,
                         "baseline platform (default a100-80g)");
  report_cmd->add_option("--norm", report_opt.norm, "raw | per_node | per_xpu");
  report_cmd->add_option("--format", report_opt.format, "text | dsv | svg");
  report_cmd->add_option("--out", report_opt.out, "output file (default stdout)");

  auto* validate_cmd = app.add_subcommand("validate", "schema-check record files");
  std::vector<std::string> validate_data;
  validate_cmd->add_option("--data", validate_data, "record files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list_cmd->parsed()) return cmd_list();
    if (describe_cmd->parsed()) return cmd_describe(describe_input, describe_scale);
    if (run_cmd->parsed()) return cmd_run(run_opt);
    if (report_cmd->parsed()) return cmd_report(report_opt);
    if (validate_cmd->parsed()) return cmd_validate(validate_data);
    std::fprintf(stderr, "no command given\n");
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const BudgetError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s (%s)\n", e.what(), e.path().c_str());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
