#pragma once

// Reader/writer for the competition file formats:
//   .mcc2020_cnf   p cnf n m
//   .mcc2020_wcnf  p wcnf n m, plus "w <lit> <weight> 0" lines
//   .mcc2020_pcnf  p pcnf n m [k], plus one "vp <vars> 0" line
// and for solver output lines "s mc N", "s wmc X", "s pmc N",
// "s log10-wmc X".

#include "mcc/number.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcc {

using Var = std::uint32_t;
/// Signed DIMACS literal: +v or -v, never 0.
using Lit = std::int32_t;
using Clause = std::vector<Lit>;

inline Var var_of(Lit l) { return static_cast<Var>(l < 0 ? -l : l); }

enum class Track { mc, wmc, pmc };

std::string_view to_string(Track t);
std::optional<Track> track_from_string(std::string_view s);
/// Track from a file name's extension (.mcc2020_cnf / _wcnf / _pcnf), or
/// nullopt when the extension is not one of the three.
std::optional<Track> track_from_path(std::string_view path);

enum class FormatErrorKind {
  MissingHeader,
  DuplicateHeader,
  MalformedHeader,
  LiteralOutOfRange,
  UnterminatedClause,
  ClauseCountMismatch,
  MalformedToken,
  WeightOutOfRange,
  DuplicateWeight,
  MalformedWeightLine,
  MissingVpLine,
  DuplicateVpLine,
  ProjectionVarOutOfRange,
  ProjectionCountMismatch,
  NoSolutionLine,
  TrackTagMismatch,
  MalformedValue,
};

std::string_view to_string(FormatErrorKind kind);

class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrorKind kind, std::size_t line, const std::string& detail);

  FormatErrorKind kind() const { return kind_; }
  /// 1-based physical line number, 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  FormatErrorKind kind_;
  std::size_t line_;
};

struct ParseOptions {
  /// Strict: header clause count is authoritative, one clause per line, no
  /// duplicate weight lines, declared projection count must match.
  bool strict = false;
  /// Receives non-fatal diagnostics when non-null.
  std::vector<std::string>* warnings = nullptr;
};

struct CnfDocument {
  Var num_vars = 0;
  std::uint64_t num_clauses = 0;
  std::vector<Clause> clauses;
  std::vector<std::string> comments;

  friend bool operator==(const CnfDocument&, const CnfDocument&) = default;
};

struct WcnfDocument {
  CnfDocument base;
  /// Explicit weights only; literals without an entry weigh 1.
  std::map<Lit, Rational> weights;

  friend bool operator==(const WcnfDocument&, const WcnfDocument&) = default;
};

struct PcnfDocument {
  CnfDocument base;
  std::set<Var> projection_vars;
  /// Optional third header field as written in the source.
  std::optional<std::uint64_t> declared_projection_count;

  friend bool operator==(const PcnfDocument& a, const PcnfDocument& b) {
    return a.base == b.base && a.projection_vars == b.projection_vars;
  }
};

struct SolutionLine {
  Track track = Track::mc;
  /// True for "s log10-wmc X"; `value` then holds X.
  bool log10 = false;
  /// Only meaningful with log10: the count was zero ("-inf").
  bool negative_infinity = false;
  Rational value;
  /// Value token exactly as printed.
  std::string text;
};

CnfDocument parse_mc(std::string_view text, const ParseOptions& options = {});
WcnfDocument parse_wmc(std::string_view text, const ParseOptions& options = {});
PcnfDocument parse_pmc(std::string_view text, const ParseOptions& options = {});

/// Canonical text: comments, header, vp line, weight lines, then one clause
/// per line. The header clause count is always clauses.size().
std::string serialize(const CnfDocument& doc);
std::string serialize(const WcnfDocument& doc);
std::string serialize(const PcnfDocument& doc);

/// Value of the last "s <tag> <value>" line in a solver's output.
SolutionLine parse_solution(std::string_view output, Track track);

}  // namespace mcc
