#ifndef GYROBENCH_REPORT_HPP
#define GYROBENCH_REPORT_HPP

// Timing-record analysis: ingest harness output or the bundled reference
// dataset, sum section subsets, compute relative performance against a
// baseline platform, and render text / dsv / svg comparisons.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gyrobench/common.hpp"
#include "gyrobench/harness.hpp"
#include "gyrobench/inputs.hpp"

namespace gyrobench::report {

using harness::Section;
using harness::SectionTiming;

// ---- records ----------------------------------------------------------------

struct TimingRecord {
  std::string system;
  std::string xpu_type;
  int n_xpu = 1;
  int n_nodes = 1;
  std::string input;
  SectionTiming sections;
  int steps_per_report = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const TimingRecord& a, const TimingRecord& b) {
    if (a.system != b.system || a.xpu_type != b.xpu_type || a.n_xpu != b.n_xpu ||
        a.n_nodes != b.n_nodes || a.input != b.input ||
        a.steps_per_report != b.steps_per_report || a.seed != b.seed)
      return false;
    for (int i = 0; i < 8; ++i)
      if (a.sections[Section(i)] != b.sections[Section(i)]) return false;
    return true;
  }
};

// ---- section sets -------------------------------------------------------------

struct SectionSet {
  std::string name;
  std::array<bool, 8> members{};

  bool empty() const {
    return std::none_of(members.begin(), members.end(), [](bool m) { return m; });
  }

  std::string members_str() const {
    std::string out;
    for (int i = 0; i < 8; ++i)
      if (members[std::size_t(i)]) {
        if (!out.empty()) out += ',';
        out += harness::kSectionNames[std::size_t(i)];
      }
    return out;
  }

  static std::optional<SectionSet> builtin(std::string_view name) {
    SectionSet s;
    s.name = std::string(name);
    if (name == "nl") {
      s.members[std::size_t(int(Section::Nl))] = true;
    } else if (name == "maintained") {
      for (Section sec : {Section::Coll, Section::Str, Section::Field, Section::Shear,
                          Section::Mem})
        s.members[std::size_t(int(sec))] = true;
    } else if (name == "memory") {
      s.members[std::size_t(int(Section::Mem))] = true;
    } else if (name == "all") {
      s.members.fill(true);
    } else {
      return std::nullopt;
    }
    return s;
  }

  // builtin name or a comma-separated list of section names
  static SectionSet parse(std::string_view spec) {
    if (auto b = builtin(spec)) return *b;
    SectionSet s;
    s.name = std::string(spec);
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      const std::size_t next = std::min(spec.find(',', pos), spec.size());
      const std::string_view tok = spec.substr(pos, next - pos);
      bool known = false;
      for (int i = 0; i < 8; ++i)
        if (tok == harness::kSectionNames[std::size_t(i)]) {
          s.members[std::size_t(i)] = true;
          known = true;
        }
      if (!known)
        throw DataError("unknown section '" + std::string(tok) +
                        "' (expected a builtin set or names among nl, coll, str, "
                        "field, shear, mem, io, comm)");
      if (next == spec.size()) break;
      pos = next + 1;
    }
    if (s.empty()) throw DataError("section set must not be empty");
    return s;
  }
};

inline std::vector<SectionSet> builtin_section_sets() {
  return {*SectionSet::builtin("nl"), *SectionSet::builtin("maintained"),
          *SectionSet::builtin("memory"), *SectionSet::builtin("all")};
}

inline double total_time(const TimingRecord& r, const SectionSet& set) {
  double sum = 0.0;
  for (int i = 0; i < 8; ++i)
    if (set.members[std::size_t(i)]) sum += r.sections[Section(i)];
  return sum;
}

// ---- bundled dataset -----------------------------------------------------------

// Reference measurements for the six catalog inputs across the four
// platforms (28 rows; the 40G part lacks the two largest inputs). Also
// shipped as data/bundled_timings.dsv with the same values.
inline std::vector<TimingRecord> bundled_dataset() {
  struct Row {
    const char* input;
    int n_xpu;
    int n_nodes;
    const char* xpu;
    const char* system;
    double t[8];  // nl coll str field shear mem io comm
  };
  static const Row rows[] = {
      {"n102", 16, 8, "Intel Max 9480 CPU", "Stampede3",
       {3.1, 1.8, 2.3, 0.5, 0.0, 0.3, 0.1, 5.2}},
      {"n102", 4, 1, "Intel Max 1550 GPU", "Stampede3",
       {3.6, 1.1, 1.1, 0.8, 0.0, 0.6, 0.3, 2.5}},
      {"n102", 4, 1, "AMD MI250X GPU", "Frontier",
       {3.8, 0.8, 1.5, 0.5, 0.0, 0.4, 0.3, 1.3}},
      {"n102", 4, 1, "NVIDIA A100 80G GPU", "Perlmutter",
       {4.2, 1.2, 1.2, 0.4, 0.0, 0.4, 0.4, 1.3}},
      {"n102", 4, 1, "NVIDIA A100 40G GPU", "Perlmutter",
       {4.5, 1.5, 1.4, 0.4, 0.0, 0.5, 0.4, 1.3}},

      {"sh03s", 48, 24, "Intel Max 9480 CPU", "Stampede3",
       {16.1, 6.8, 9.8, 2.2, 3.6, 1.7, 0.2, 35.5}},
      {"sh03s", 24, 6, "Intel Max 1550 GPU", "Stampede3",
       {14.4, 3.6, 4.6, 1.9, 0.5, 1.9, 0.7, 36.9}},
      {"sh03s", 24, 6, "AMD MI250X GPU", "Frontier",
       {12.9, 2.3, 5.4, 0.8, 0.3, 1.3, 0.4, 10.4}},
      {"sh03s", 24, 6, "NVIDIA A100 80G GPU", "Perlmutter",
       {15.5, 3.6, 4.4, 1.1, 0.7, 1.2, 1.0, 12.3}},

      {"n103", 64, 32, "Intel Max 9480 CPU", "Stampede3",
       {17.1, 1.4, 9.6, 2.2, 0.0, 1.7, 0.2, 22.8}},
      {"n103", 16, 4, "Intel Max 1550 GPU", "Stampede3",
       {15.6, 0.7, 4.6, 2.2, 0.0, 2.4, 0.8, 44.2}},
      {"n103", 16, 4, "AMD MI250X GPU", "Frontier",
       {14.4, 1.3, 5.9, 0.8, 0.0, 1.5, 0.8, 12.0}},
      {"n103", 16, 4, "NVIDIA A100 80G GPU", "Perlmutter",
       {14.6, 0.8, 4.8, 1.1, 0.0, 1.4, 1.7, 14.1}},
      {"n103", 16, 4, "NVIDIA A100 40G GPU", "Perlmutter",
       {17.4, 0.8, 5.5, 1.3, 0.0, 1.6, 1.8, 15.0}},

      {"bg03n", 64, 32, "Intel Max 9480 CPU", "Stampede3",
       {29.5, 0.9, 14.3, 4.1, 5.8, 2.4, 0.2, 32.3}},
      {"bg03n", 16, 4, "Intel Max 1550 GPU", "Stampede3",
       {36.4, 0.5, 7.2, 2.8, 0.7, 3.3, 0.7, 49.3}},
      {"bg03n", 16, 4, "AMD MI250X GPU", "Frontier",
       {19.7, 0.7, 8.7, 1.0, 0.5, 2.0, 1.4, 15.9}},
      {"bg03n", 16, 4, "NVIDIA A100 80G GPU", "Perlmutter",
       {20.2, 0.4, 6.0, 1.1, 1.2, 2.1, 1.2, 22.7}},
      {"bg03n", 16, 4, "NVIDIA A100 40G GPU", "Perlmutter",
       {22.8, 0.3, 6.8, 1.2, 1.5, 2.4, 1.1, 23.8}},

      {"sh04n", 64, 32, "Intel Max 9480 CPU", "Stampede3",
       {34.2, 1.6, 13.8, 3.9, 6.1, 2.6, 0.3, 36.4}},
      {"sh04n", 16, 4, "Intel Max 1550 GPU", "Stampede3",
       {47.6, 0.8, 7.0, 3.1, 0.7, 4.0, 1.0, 70.6}},
      {"sh04n", 16, 4, "AMD MI250X GPU", "Frontier",
       {21.6, 1.5, 8.9, 1.3, 0.5, 2.3, 1.6, 18.8}},
      {"sh04n", 16, 4, "NVIDIA A100 80G GPU", "Perlmutter",
       {24.0, 0.5, 5.6, 1.4, 0.8, 2.0, 1.3, 30.4}},

      {"bg04n", 64, 32, "Intel Max 9480 CPU", "Stampede3",
       {48.3, 0.8, 13.6, 6.6, 5.4, 2.6, 0.2, 51.8}},
      {"bg04n", 16, 4, "Intel Max 1550 GPU", "Stampede3",
       {42.5, 0.4, 6.8, 2.9, 0.6, 3.0, 0.7, 56.3}},
      {"bg04n", 16, 4, "AMD MI250X GPU", "Frontier",
       {27.2, 0.6, 8.3, 1.3, 0.4, 2.1, 1.2, 15.7}},
      {"bg04n", 16, 4, "NVIDIA A100 80G GPU", "Perlmutter",
       {23.7, 0.2, 5.1, 1.4, 0.7, 1.9, 1.0, 25.6}},
      {"bg04n", 16, 4, "NVIDIA A100 40G GPU", "Perlmutter",
       {27.4, 0.3, 5.8, 1.8, 0.8, 2.1, 1.0, 26.9}},
  };

  std::vector<TimingRecord> out;
  out.reserve(std::size(rows));
  for (const Row& row : rows) {
    TimingRecord r;
    r.system = row.system;
    r.xpu_type = row.xpu;
    r.n_xpu = row.n_xpu;
    r.n_nodes = row.n_nodes;
    r.input = row.input;
    for (int i = 0; i < 8; ++i) r.sections[Section(i)] = row.t[i];
    r.steps_per_report = 1;
    r.seed = 0;
    out.push_back(std::move(r));
  }
  return out;
}

// ---- platform matching -----------------------------------------------------------

// Short label for a platform: vendor and the gpu/cpu suffix dropped,
// remaining tokens joined with '-'. "NVIDIA A100 80G GPU" -> "a100-80g".
inline std::string xpu_slug(const std::string& xpu_type) {
  std::string slug;
  std::istringstream in(xpu_type);
  std::string tok;
  while (in >> tok) {
    std::string low;
    for (char c : tok) low += char(std::tolower((unsigned char)c));
    if (low == "intel" || low == "amd" || low == "nvidia" || low == "gpu" || low == "cpu")
      continue;
    if (!slug.empty()) slug += '-';
    slug += low;
  }
  return slug.empty() ? xpu_type : slug;
}

namespace detail_match {
inline std::string fold(std::string_view s) {
  std::string out;
  for (char c : s)
    if (std::isalnum((unsigned char)c)) out += char(std::tolower((unsigned char)c));
  return out;
}
}  // namespace detail_match

inline bool matches_platform(const TimingRecord& r, std::string_view query) {
  const std::string q = detail_match::fold(query);
  return q == detail_match::fold(xpu_slug(r.xpu_type)) ||
         q == detail_match::fold(r.xpu_type) || q == detail_match::fold(r.system);
}

// ---- relative performance -----------------------------------------------------------

enum class Norm { Raw, PerNode, PerXpu };

inline const char* norm_name(Norm n) {
  switch (n) {
    case Norm::Raw: return "raw";
    case Norm::PerNode: return "per_node";
    default: return "per_xpu";
  }
}

inline Norm parse_norm(std::string_view s) {
  if (s == "raw") return Norm::Raw;
  if (s == "per_node") return Norm::PerNode;
  if (s == "per_xpu") return Norm::PerXpu;
  throw DataError("unknown norm '" + std::string(s) + "' (raw, per_node, per_xpu)");
}

struct RatioRow {
  std::string system;
  std::string xpu_type;
  int n_xpu = 1;
  int n_nodes = 1;
  double total_seconds = 0.0;
  bool has_rate = true;  // false when the section set sums to zero
  double ratio = 0.0;
};

struct RatioTable {
  std::string input;
  std::string section_set;
  std::string norm;
  std::string baseline;
  std::vector<RatioRow> rows;
};

// rate(r) = 1 / (total_time(r, set) * divisor); each row reports
// rate / rate(baseline). Rows whose set total is zero carry no rate.
inline RatioTable relative_performance(std::span<const TimingRecord> records,
                                       const std::string& input, const SectionSet& set,
                                       const std::string& baseline,
                                       Norm norm = Norm::PerXpu) {
  if (set.empty()) throw DataError("section set must not be empty");
  RatioTable table;
  table.input = input;
  table.section_set = set.name;
  table.norm = norm_name(norm);
  table.baseline = baseline;

  auto divisor = [&](const TimingRecord& r) {
    switch (norm) {
      case Norm::Raw: return 1.0;
      case Norm::PerNode: return double(r.n_nodes);
      default: return double(r.n_xpu);
    }
  };

  std::vector<const TimingRecord*> selected;
  for (const auto& r : records) {
    if (r.input != input) throw DataError("mixed inputs in relative_performance");
    selected.push_back(&r);
  }
  if (selected.empty()) throw DataError("no records for input '" + input + "'");

  const TimingRecord* base = nullptr;
  for (const auto* r : selected)
    if (matches_platform(*r, baseline)) {
      base = r;
      break;
    }
  if (!base)
    throw DataError("baseline '" + baseline + "' not found among the records for '" +
                    input + "'");

  const double base_total = total_time(*base, set);
  if (base_total <= 0.0)
    throw DataError("baseline '" + baseline + "' has no measurable time in set '" +
                    set.name + "'");
  const double base_rate = 1.0 / (base_total * divisor(*base));

  for (const auto* r : selected) {
    RatioRow row;
    row.system = r->system;
    row.xpu_type = r->xpu_type;
    row.n_xpu = r->n_xpu;
    row.n_nodes = r->n_nodes;
    row.total_seconds = total_time(*r, set);
    if (row.total_seconds <= 0.0) {
      row.has_rate = false;
    } else {
      row.ratio = (1.0 / (row.total_seconds * divisor(*r))) / base_rate;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// One ratio table per input, catalog order; inputs absent from the records
// are skipped, as are inputs lacking the baseline platform.
struct Figure {
  std::string section_set;
  std::string norm;
  std::string baseline;
  std::vector<RatioTable> groups;
};

inline Figure make_figure(std::span<const TimingRecord> records, const SectionSet& set,
                          const std::string& baseline, Norm norm = Norm::PerXpu) {
  Figure fig;
  fig.section_set = set.name;
  fig.norm = norm_name(norm);
  fig.baseline = baseline;
  for (const auto& input : catalog()) {
    std::vector<TimingRecord> group;
    for (const auto& r : records)
      if (r.input == input.name) group.push_back(r);
    if (group.empty()) continue;
    const bool has_base = std::any_of(group.begin(), group.end(), [&](const auto& r) {
      return matches_platform(r, baseline);
    });
    if (!has_base) continue;
    fig.groups.push_back(relative_performance(group, input.name, set, baseline, norm));
  }
  if (fig.groups.empty())
    throw DataError("no input group contains the baseline '" + baseline + "'");
  return fig;
}

// ---- emission -----------------------------------------------------------------------

enum class Format { Text, Dsv, Svg };

inline Format parse_format(std::string_view s) {
  if (s == "text") return Format::Text;
  if (s == "dsv") return Format::Dsv;
  if (s == "svg") return Format::Svg;
  throw DataError("unknown format '" + std::string(s) + "' (text, dsv, svg)");
}

namespace detail_emit {

inline std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail_emit

inline void emit_text(const Figure& fig, std::ostream& out) {
  out << "relative performance, sections=" << fig.section_set << ", norm=" << fig.norm
      << ", baseline=" << fig.baseline << "\n";
  for (const auto& table : fig.groups) {
    out << "\n" << table.input << "\n";
    std::size_t label_w = 8;
    for (const auto& row : table.rows)
      label_w = std::max(label_w, xpu_slug(row.xpu_type).size());
    for (const auto& row : table.rows) {
      std::ostringstream cfg;
      cfg << row.n_xpu << " (" << row.n_nodes << ")";
      out << "  " << std::left << std::setw(int(label_w) + 2) << xpu_slug(row.xpu_type)
          << std::right << std::setw(9) << cfg.str() << "  " << std::setw(10)
          << detail_emit::fmt(row.total_seconds) << " s  "
          << (row.has_rate ? detail_emit::fmt(row.ratio) : std::string("n/a")) << "\n";
    }
  }
}

inline constexpr const char* kRatioHeader =
    "input,system,xpu_type,n_xpu,n_nodes,sections,norm,baseline,total_seconds,ratio";

inline void emit_dsv(const Figure& fig, std::ostream& out) {
  out << kRatioHeader << '\n';
  for (const auto& table : fig.groups)
    for (const auto& row : table.rows)
      out << table.input << ',' << row.system << ',' << row.xpu_type << ',' << row.n_xpu
          << ',' << row.n_nodes << ',' << table.section_set << ',' << table.norm << ','
          << table.baseline << ',' << detail_emit::fmt(row.total_seconds, 6) << ','
          << (row.has_rate ? detail_emit::fmt(row.ratio, 6) : std::string("n/a"))
          << '\n';
}

// Grouped bar chart: one group per input, one rect per measured bar.
inline void emit_svg(const Figure& fig, std::ostream& out) {
  constexpr double bar_w = 26.0, bar_gap = 4.0, group_gap = 34.0;
  constexpr double margin_l = 56.0, margin_r = 16.0, margin_t = 28.0, margin_b = 52.0;
  constexpr double plot_h = 280.0;

  double max_ratio = 1.0;
  std::size_t bars = 0;
  for (const auto& table : fig.groups)
    for (const auto& row : table.rows)
      if (row.has_rate) {
        max_ratio = std::max(max_ratio, row.ratio);
        ++bars;
      }

  double x = margin_l;
  std::vector<double> group_x;
  for (const auto& table : fig.groups) {
    group_x.push_back(x);
    x += double(table.rows.size()) * (bar_w + bar_gap) + group_gap;
  }
  const double width = x - group_gap + margin_r;
  const double height = margin_t + plot_h + margin_b;
  const double base_y = margin_t + plot_h;

  static constexpr const char* palette[] = {"#4477aa", "#ee6677", "#228833",
                                            "#ccbb44", "#66ccee", "#aa3377"};

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << int(width)
      << "\" height=\"" << int(height) << "\" viewBox=\"0 0 " << int(width) << ' '
      << int(height) << "\">\n";
  out << "  <title>" << detail_emit::xml_escape(fig.section_set)
      << " relative performance (" << detail_emit::xml_escape(fig.norm) << ", baseline "
      << detail_emit::xml_escape(fig.baseline) << ")</title>\n";
  out << "  <line x1=\"" << margin_l - 8 << "\" y1=\"" << base_y << "\" x2=\""
      << width - margin_r << "\" y2=\"" << base_y
      << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  // baseline ratio gridline
  const double one_y = base_y - plot_h * (1.0 / max_ratio);
  out << "  <line x1=\"" << margin_l - 8 << "\" y1=\"" << one_y << "\" x2=\""
      << width - margin_r << "\" y2=\"" << one_y
      << "\" stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
  out << "  <text x=\"" << margin_l - 12 << "\" y=\"" << one_y + 4
      << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">1.0</text>\n";

  for (std::size_t g = 0; g < fig.groups.size(); ++g) {
    const auto& table = fig.groups[g];
    double bx = group_x[g];
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      if (row.has_rate) {
        const double h = plot_h * (row.ratio / max_ratio);
        out << "  <rect x=\"" << detail_emit::fmt(bx, 1) << "\" y=\""
            << detail_emit::fmt(base_y - h, 1) << "\" width=\"" << bar_w
            << "\" height=\"" << detail_emit::fmt(h, 1) << "\" fill=\""
            << palette[i % std::size(palette)] << "\">\n";
        out << "    <title>" << detail_emit::xml_escape(xpu_slug(row.xpu_type)) << ": "
            << detail_emit::fmt(row.ratio) << "</title>\n";
        out << "  </rect>\n";
      } else {
        out << "  <text x=\"" << detail_emit::fmt(bx + bar_w / 2, 1) << "\" y=\""
            << base_y - 6 << "\" font-size=\"10\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\">n/a</text>\n";
      }
      bx += bar_w + bar_gap;
    }
    const double center = group_x[g] +
                          (double(table.rows.size()) * (bar_w + bar_gap) - bar_gap) / 2;
    out << "  <text x=\"" << detail_emit::fmt(center, 1) << "\" y=\"" << base_y + 18
        << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << detail_emit::xml_escape(table.input) << "</text>\n";
  }
  out << "</svg>\n";
  (void)bars;
}

inline void emit(const Figure& fig, Format format, std::ostream& out) {
  switch (format) {
    case Format::Text: emit_text(fig, out); break;
    case Format::Dsv: emit_dsv(fig, out); break;
    case Format::Svg: emit_svg(fig, out); break;
  }
  if (!out) throw IoError("emit failed", "<stream>");
}

inline void emit(const Figure& fig, Format format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open report output", path.string());
  emit(fig, format, out);
  out.flush();
  if (!out) throw IoError("report write failed", path.string());
}

// Records in the harness dsv schema, one line per record.
inline void emit_records(std::span<const TimingRecord> records, std::ostream& out) {
  harness::write_record_header(out);
  for (const auto& r : records)
    harness::write_record(out, r.system, r.xpu_type, r.n_xpu, r.n_nodes, r.input,
                          r.sections, r.steps_per_report, r.seed);
}

// ---- ingest -----------------------------------------------------------------------

namespace detail_ingest {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    while (!f.empty() && std::isspace((unsigned char)f.front())) f.erase(f.begin());
    while (!f.empty() && std::isspace((unsigned char)f.back())) f.pop_back();
  }
  return out;
}

inline double parse_time(const std::string& s, const std::string& where, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad number '" + s + "' in " + where, line);
  }
  if (used != s.size()) throw ParseError("bad number '" + s + "' in " + where, line);
  if (!std::isfinite(v)) throw ParseError("non-finite time in " + where, line);
  if (v < 0.0) throw ParseError("negative time " + s + " in " + where, line);
  return v;
}

inline std::int64_t parse_int(const std::string& s, const std::string& where, int line) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad integer '" + s + "' in " + where, line);
  }
  if (used != s.size()) throw ParseError("bad integer '" + s + "' in " + where, line);
  return v;
}

}  // namespace detail_ingest

// Parse one record file (harness output schema). Repeated records of the
// same configuration, e.g. the per-report lines of one run, are averaged
// into a single TimingRecord; group order follows first appearance.
inline std::vector<TimingRecord> ingest(std::istream& in, const std::string& origin) {
  using namespace detail_ingest;
  std::vector<std::string> names;
  {
    std::istringstream hdr(harness::kRecordHeader);
    std::string f;
    while (std::getline(hdr, f, ',')) names.push_back(f);
  }

  struct Group {
    TimingRecord sum;
    std::int64_t count = 0;
  };
  std::vector<Group> groups;

  const auto known_inputs = catalog();
  auto known_input = [&](const std::string& name) {
    return std::any_of(known_inputs.begin(), known_inputs.end(),
                       [&](const auto& i) { return i.name == name; });
  };

  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    while (!sv.empty() && std::isspace((unsigned char)sv.front())) sv.remove_prefix(1);
    if (sv.empty() || sv.front() == '#') continue;

    const auto fields = split_csv(line);
    if (!saw_header) {
      if (fields.size() != names.size())
        throw ParseError("header of " + origin + " must have " +
                             std::to_string(names.size()) + " fields, got " +
                             std::to_string(fields.size()),
                         line_no);
      for (std::size_t i = 0; i < names.size(); ++i)
        if (fields[i] != names[i])
          throw ParseError("header field " + std::to_string(i + 1) + " of " + origin +
                               " must be '" + names[i] + "', got '" + fields[i] + "'",
                           line_no);
      saw_header = true;
      continue;
    }

    if (fields.size() != names.size())
      throw ParseError("record in " + origin + " must have " +
                           std::to_string(names.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);

    TimingRecord r;
    r.system = fields[0];
    r.xpu_type = fields[1];
    r.n_xpu = int(parse_int(fields[2], "n_xpu", line_no));
    r.n_nodes = int(parse_int(fields[3], "n_nodes", line_no));
    if (r.n_nodes < 1 || r.n_xpu < r.n_nodes)
      throw ParseError("need n_xpu >= n_nodes >= 1", line_no);
    r.input = fields[4];
    if (!known_input(r.input))
      throw ParseError("unknown input '" + r.input + "'", line_no);
    for (int i = 0; i < 8; ++i)
      r.sections[Section(i)] =
          parse_time(fields[std::size_t(5 + i)],
                     harness::kSectionNames[std::size_t(i)], line_no);
    const std::int64_t spr = parse_int(fields[13], "steps_per_report", line_no);
    if (spr < 1) throw ParseError("steps_per_report must be at least 1", line_no);
    r.steps_per_report = int(spr);
    r.seed = std::uint64_t(parse_int(fields[14], "seed", line_no));

    Group* group = nullptr;
    for (auto& g : groups)
      if (g.sum.system == r.system && g.sum.xpu_type == r.xpu_type &&
          g.sum.n_xpu == r.n_xpu && g.sum.n_nodes == r.n_nodes &&
          g.sum.input == r.input) {
        group = &g;
        break;
      }
    if (!group) {
      groups.push_back({r, 1});
    } else {
      for (int i = 0; i < 8; ++i)
        group->sum.sections[Section(i)] += r.sections[Section(i)];
      ++group->count;
    }
  }
  if (!saw_header)
    throw ParseError("no header line found in " + origin, std::max(line_no, 1));

  std::vector<TimingRecord> out;
  out.reserve(groups.size());
  for (auto& g : groups) {
    if (g.count > 1)
      for (int i = 0; i < 8; ++i) g.sum.sections[Section(i)] /= double(g.count);
    out.push_back(std::move(g.sum));
  }
  return out;
}

inline std::vector<TimingRecord> ingest(const std::vector<std::filesystem::path>& paths) {
  std::vector<TimingRecord> all;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file", path.string());
    auto records = ingest(in, path.filename().string());
    all.insert(all.end(), records.begin(), records.end());
  }
  return all;
}

}  // namespace gyrobench::report

#endif  // GYROBENCH_REPORT_HPP
