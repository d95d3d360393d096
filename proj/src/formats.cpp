#include "mcc/formats.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

namespace mcc {

std::string_view to_string(Track t) {
  switch (t) {
    case Track::mc: return "mc";
    case Track::wmc: return "wmc";
    case Track::pmc: return "pmc";
  }
  return "?";
}

std::optional<Track> track_from_string(std::string_view s) {
  if (s == "mc") return Track::mc;
  if (s == "wmc") return Track::wmc;
  if (s == "pmc") return Track::pmc;
  return std::nullopt;
}

std::optional<Track> track_from_path(std::string_view path) {
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
  };
  if (ends_with(".mcc2020_cnf")) return Track::mc;
  if (ends_with(".mcc2020_wcnf")) return Track::wmc;
  if (ends_with(".mcc2020_pcnf")) return Track::pmc;
  return std::nullopt;
}

std::string_view to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::MissingHeader: return "MissingHeader";
    case FormatErrorKind::DuplicateHeader: return "DuplicateHeader";
    case FormatErrorKind::MalformedHeader: return "MalformedHeader";
    case FormatErrorKind::LiteralOutOfRange: return "LiteralOutOfRange";
    case FormatErrorKind::UnterminatedClause: return "UnterminatedClause";
    case FormatErrorKind::ClauseCountMismatch: return "ClauseCountMismatch";
    case FormatErrorKind::MalformedToken: return "MalformedToken";
    case FormatErrorKind::WeightOutOfRange: return "WeightOutOfRange";
    case FormatErrorKind::DuplicateWeight: return "DuplicateWeight";
    case FormatErrorKind::MalformedWeightLine: return "MalformedWeightLine";
    case FormatErrorKind::MissingVpLine: return "MissingVpLine";
    case FormatErrorKind::DuplicateVpLine: return "DuplicateVpLine";
    case FormatErrorKind::ProjectionVarOutOfRange: return "ProjectionVarOutOfRange";
    case FormatErrorKind::ProjectionCountMismatch: return "ProjectionCountMismatch";
    case FormatErrorKind::NoSolutionLine: return "NoSolutionLine";
    case FormatErrorKind::TrackTagMismatch: return "TrackTagMismatch";
    case FormatErrorKind::MalformedValue: return "MalformedValue";
  }
  return "?";
}

namespace {

std::string describe(FormatErrorKind kind, std::size_t line, const std::string& detail) {
  std::ostringstream os;
  os << to_string(kind);
  if (line > 0) os << " (line " << line << ")";
  if (!detail.empty()) os << ": " << detail;
  return os.str();
}

}  // namespace

FormatError::FormatError(FormatErrorKind kind, std::size_t line, const std::string& detail)
    : std::runtime_error(describe(kind, line, detail)), kind_(kind), line_(line) {}

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_blank(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = end + 1;
  }
}

std::optional<std::int64_t> to_int(std::string_view tok) {
  std::int64_t value = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

struct ParsedText {
  CnfDocument base;
  std::map<Lit, Rational> weights;
  std::set<Var> projection_vars;
  std::optional<std::uint64_t> declared_projection_count;
  bool saw_vp = false;
};

void warn(const ParseOptions& options, std::size_t line, const std::string& message) {
  if (options.warnings == nullptr) return;
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << message;
  options.warnings->push_back(os.str());
}

class DocumentParser {
 public:
  DocumentParser(Track track, const ParseOptions& options) : track_(track), options_(options) {}

  ParsedText run(std::string_view text) {
    for_each_line(text, [this](std::size_t line_no, std::string_view line) { on_line(line_no, line); });
    finish();
    return std::move(out_);
  }

 private:
  void on_line(std::size_t line_no, std::string_view line) {
    std::size_t first = 0;
    while (first < line.size() && is_blank(line[first])) ++first;
    line.remove_prefix(first);
    if (line.empty()) return;

    if (line.front() == 'c') {
      std::string_view rest = line.substr(1);
      if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      out_.base.comments.emplace_back(rest);
      return;
    }

    auto tokens = split_tokens(line);
    if (tokens.front() == "p") {
      if (header_seen_) throw FormatError(FormatErrorKind::DuplicateHeader, line_no, "second 'p' line");
      if (!pending_.empty()) throw FormatError(FormatErrorKind::UnterminatedClause, line_no, "clause open at header");
      parse_header(line_no, tokens);
      return;
    }
    if (!header_seen_) {
      throw FormatError(FormatErrorKind::MissingHeader, line_no, "content before the 'p' line");
    }
    if (tokens.front() == "w") {
      if (track_ != Track::wmc) throw FormatError(FormatErrorKind::MalformedToken, line_no, "weight line outside wcnf");
      parse_weight(line_no, tokens);
      return;
    }
    if (tokens.front() == "vp") {
      if (track_ != Track::pmc) throw FormatError(FormatErrorKind::MalformedToken, line_no, "vp line outside pcnf");
      parse_vp(line_no, tokens);
      return;
    }
    parse_clause_tokens(line_no, tokens);
  }

  void parse_header(std::size_t line_no, const std::vector<std::string_view>& tokens) {
    std::string_view expected = track_ == Track::mc ? "cnf" : track_ == Track::wmc ? "wcnf" : "pcnf";
    std::size_t max_fields = track_ == Track::pmc ? 5 : 4;
    if (tokens.size() < 4 || tokens.size() > max_fields) {
      throw FormatError(FormatErrorKind::MalformedHeader, line_no, "expected 'p " + std::string(expected) + " n m'");
    }
    if (tokens[1] != expected) {
      throw FormatError(FormatErrorKind::MalformedHeader, line_no,
                        "descriptor '" + std::string(tokens[1]) + "', expected '" + std::string(expected) + "'");
    }
    auto n = to_int(tokens[2]);
    auto m = to_int(tokens[3]);
    if (!n || !m || *n < 0 || *m < 0 || *n > std::numeric_limits<Lit>::max()) {
      throw FormatError(FormatErrorKind::MalformedHeader, line_no, "bad variable or clause count");
    }
    if (*n == 0 && options_.strict) {
      throw FormatError(FormatErrorKind::MalformedHeader, line_no, "zero variables");
    }
    if (tokens.size() == 5) {
      auto k = to_int(tokens[4]);
      if (!k || *k < 0) throw FormatError(FormatErrorKind::MalformedHeader, line_no, "bad projection count");
      out_.declared_projection_count = static_cast<std::uint64_t>(*k);
    }
    out_.base.num_vars = static_cast<Var>(*n);
    out_.base.num_clauses = static_cast<std::uint64_t>(*m);
    header_seen_ = true;
  }

  Lit checked_literal(std::size_t line_no, std::string_view tok) const {
    auto v = to_int(tok);
    if (!v) throw FormatError(FormatErrorKind::MalformedToken, line_no, "'" + std::string(tok) + "'");
    std::int64_t mag = *v < 0 ? -*v : *v;
    if (mag > static_cast<std::int64_t>(out_.base.num_vars)) {
      throw FormatError(FormatErrorKind::LiteralOutOfRange, line_no,
                        std::to_string(*v) + " with n=" + std::to_string(out_.base.num_vars));
    }
    return static_cast<Lit>(*v);
  }

  void parse_clause_tokens(std::size_t line_no, const std::vector<std::string_view>& tokens) {
    bool closed_on_line = false;
    for (auto tok : tokens) {
      if (closed_on_line && options_.strict) {
        throw FormatError(FormatErrorKind::MalformedToken, line_no, "more than one clause on a line");
      }
      Lit lit = checked_literal(line_no, tok);
      if (lit == 0) {
        out_.base.clauses.push_back(std::move(pending_));
        pending_.clear();
        closed_on_line = true;
      } else {
        pending_.push_back(lit);
      }
    }
    if (!pending_.empty() && options_.strict) {
      throw FormatError(FormatErrorKind::UnterminatedClause, line_no, "clause not terminated by 0 on its line");
    }
  }

  void parse_weight(std::size_t line_no, const std::vector<std::string_view>& tokens) {
    bool terminated = tokens.size() == 4 && tokens[3] == "0";
    bool lenient_short = tokens.size() == 3 && !options_.strict;
    if (!terminated && !lenient_short) {
      throw FormatError(FormatErrorKind::MalformedWeightLine, line_no, "expected 'w Literal Weight 0'");
    }
    auto raw = to_int(tokens[1]);
    if (!raw || *raw == 0) throw FormatError(FormatErrorKind::MalformedWeightLine, line_no, "bad literal");
    Lit lit = checked_literal(line_no, tokens[1]);
    auto weight = parse_decimal(tokens[2]);
    if (!weight) {
      throw FormatError(FormatErrorKind::MalformedWeightLine, line_no, "bad weight '" + std::string(tokens[2]) + "'");
    }
    if (sgn(*weight) < 0 || *weight > 1) {
      throw FormatError(FormatErrorKind::WeightOutOfRange, line_no,
                        "literal " + std::to_string(lit) + " weight " + weight->get_str());
    }
    auto [it, inserted] = out_.weights.insert_or_assign(lit, *weight);
    if (!inserted) {
      if (options_.strict) throw FormatError(FormatErrorKind::DuplicateWeight, line_no, "literal " + std::to_string(lit));
      warn(options_, line_no, "duplicate weight for literal " + std::to_string(lit) + ", last one kept");
    }
  }

  void parse_vp(std::size_t line_no, const std::vector<std::string_view>& tokens) {
    if (out_.saw_vp) throw FormatError(FormatErrorKind::DuplicateVpLine, line_no, "second 'vp' line");
    out_.saw_vp = true;
    if (tokens.back() != "0") throw FormatError(FormatErrorKind::UnterminatedClause, line_no, "vp line without 0");
    for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
      auto v = to_int(tokens[i]);
      if (!v) throw FormatError(FormatErrorKind::MalformedToken, line_no, "'" + std::string(tokens[i]) + "'");
      if (*v <= 0 || *v > static_cast<std::int64_t>(out_.base.num_vars)) {
        if (*v == 0) throw FormatError(FormatErrorKind::MalformedToken, line_no, "0 before end of vp line");
        throw FormatError(FormatErrorKind::ProjectionVarOutOfRange, line_no, std::to_string(*v));
      }
      out_.projection_vars.insert(static_cast<Var>(*v));
    }
  }

  void finish() {
    if (!header_seen_) throw FormatError(FormatErrorKind::MissingHeader, 0, "no 'p' line");
    if (!pending_.empty()) throw FormatError(FormatErrorKind::UnterminatedClause, 0, "last clause lacks 0");
    const auto found = out_.base.clauses.size();
    if (found != out_.base.num_clauses) {
      std::string msg = "header says " + std::to_string(out_.base.num_clauses) + ", found " + std::to_string(found);
      if (options_.strict) throw FormatError(FormatErrorKind::ClauseCountMismatch, 0, msg);
      warn(options_, 0, "clause count mismatch: " + msg);
    }
    if (track_ == Track::pmc) {
      if (!out_.saw_vp) throw FormatError(FormatErrorKind::MissingVpLine, 0, "no 'vp' line");
      if (out_.declared_projection_count && *out_.declared_projection_count != out_.projection_vars.size()) {
        std::string msg = "header says " + std::to_string(*out_.declared_projection_count) + ", vp line has " +
                          std::to_string(out_.projection_vars.size());
        if (options_.strict) throw FormatError(FormatErrorKind::ProjectionCountMismatch, 0, msg);
        warn(options_, 0, "projection count mismatch: " + msg);
      }
    }
    if (track_ == Track::wmc && options_.strict) {
      for (const auto& [lit, w] : out_.weights) {
        if (out_.weights.find(-lit) == out_.weights.end()) {
          warn(options_, 0, "weight given for literal " + std::to_string(lit) + " but not for " + std::to_string(-lit));
        }
      }
    }
  }

  Track track_;
  const ParseOptions& options_;
  ParsedText out_;
  Clause pending_;
  bool header_seen_ = false;
};

void write_comments_and_header(std::ostringstream& os, const CnfDocument& doc, std::string_view descriptor) {
  for (const auto& c : doc.comments) {
    os << 'c';
    if (!c.empty()) os << ' ' << c;
    os << '\n';
  }
  os << "p " << descriptor << ' ' << doc.num_vars << ' ' << doc.clauses.size() << '\n';
}

void write_clauses(std::ostringstream& os, const CnfDocument& doc) {
  for (const auto& clause : doc.clauses) {
    for (Lit l : clause) os << l << ' ';
    os << "0\n";
  }
}

}  // namespace

CnfDocument parse_mc(std::string_view text, const ParseOptions& options) {
  return DocumentParser(Track::mc, options).run(text).base;
}

WcnfDocument parse_wmc(std::string_view text, const ParseOptions& options) {
  auto parsed = DocumentParser(Track::wmc, options).run(text);
  return WcnfDocument{std::move(parsed.base), std::move(parsed.weights)};
}

PcnfDocument parse_pmc(std::string_view text, const ParseOptions& options) {
  auto parsed = DocumentParser(Track::pmc, options).run(text);
  return PcnfDocument{std::move(parsed.base), std::move(parsed.projection_vars), parsed.declared_projection_count};
}

std::string serialize(const CnfDocument& doc) {
  std::ostringstream os;
  write_comments_and_header(os, doc, "cnf");
  write_clauses(os, doc);
  return os.str();
}

std::string serialize(const WcnfDocument& doc) {
  std::ostringstream os;
  write_comments_and_header(os, doc.base, "wcnf");
  std::vector<std::pair<Lit, const Rational*>> ordered;
  ordered.reserve(doc.weights.size());
  for (const auto& [lit, w] : doc.weights) ordered.emplace_back(lit, &w);
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (var_of(a.first) != var_of(b.first)) return var_of(a.first) < var_of(b.first);
    return a.first > b.first;
  });
  for (const auto& [lit, w] : ordered) {
    auto text = format_exact(*w);
    if (!text) throw std::invalid_argument("weight of literal " + std::to_string(lit) + " has no finite decimal form");
    os << "w " << lit << ' ' << *text << " 0\n";
  }
  write_clauses(os, doc.base);
  return os.str();
}

std::string serialize(const PcnfDocument& doc) {
  std::ostringstream os;
  write_comments_and_header(os, doc.base, "pcnf");
  os << "vp";
  for (Var v : doc.projection_vars) os << ' ' << v;
  os << " 0\n";
  write_clauses(os, doc.base);
  return os.str();
}

SolutionLine parse_solution(std::string_view output, Track track) {
  std::optional<std::vector<std::string_view>> last;
  std::size_t last_line = 0;
  for_each_line(output, [&](std::size_t line_no, std::string_view line) {
    auto tokens = split_tokens(line);
    if (tokens.size() < 3 || tokens[0] != "s") return;
    auto tag = tokens[1];
    if (tag != "mc" && tag != "wmc" && tag != "pmc" && tag != "log10-wmc") return;
    last = std::move(tokens);
    last_line = line_no;
  });
  if (!last) throw FormatError(FormatErrorKind::NoSolutionLine, 0, "no 's <track> <value>' line");

  const auto& tokens = *last;
  std::string_view tag = tokens[1];
  bool log_form = tag == "log10-wmc";
  bool tag_ok = log_form ? track == Track::wmc : tag == to_string(track);
  if (!tag_ok) {
    throw FormatError(FormatErrorKind::TrackTagMismatch, last_line,
                      "found '" + std::string(tag) + "', expected '" + std::string(to_string(track)) + "'");
  }
  if (tokens.size() != 3) throw FormatError(FormatErrorKind::MalformedValue, last_line, "trailing tokens");

  SolutionLine out;
  out.track = track;
  out.log10 = log_form;
  out.text = std::string(tokens[2]);
  if (log_form) {
    if (out.text == "-inf") {
      out.negative_infinity = true;
      return out;
    }
    auto v = parse_decimal(out.text);
    if (!v) throw FormatError(FormatErrorKind::MalformedValue, last_line, out.text);
    out.value = *v;
  } else if (track == Track::wmc) {
    auto v = parse_decimal(out.text);
    if (!v || sgn(*v) < 0) throw FormatError(FormatErrorKind::MalformedValue, last_line, out.text);
    out.value = *v;
  } else {
    auto v = parse_integer(out.text);
    if (!v) throw FormatError(FormatErrorKind::MalformedValue, last_line, out.text);
    out.value = Rational(*v);
  }
  return out;
}

}  // namespace mcc
