#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbsat/model.hpp"

namespace pbsat {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// DIMACS CNF. Clauses are normalized, so repeated literals merge and
// tautologies disappear; an empty clause becomes the falsum.
Instance parse_dimacs(std::string_view text);

// Linear OPB subset: "+2 x1 -1 ~x3 >= 2 ;" or "... = k ;", comments start with '*'.
Instance parse_opb(std::string_view text);

// Picks the DIMACS parser when the first significant line starts with 'c' or 'p'.
Instance parse_instance(std::string_view text);

// Throws std::invalid_argument if some constraint is not a clause.
std::string write_dimacs(const Instance& instance);
std::string write_opb(const Instance& instance);

// Whitespace-separated signed integers, one per variable; 'v' tokens, a
// terminating 0 and lines starting with 'c' or 's' are skipped. Throws
// ParseError on conflicting, out-of-range or missing variables.
std::vector<bool> parse_model(std::string_view text, Var num_vars);

// "v 1 -2 3 ... 0" split over lines of at most `per_line` literals.
std::string format_model(const std::vector<bool>& model, size_t per_line = 16);

struct VerifyResult {
  bool ok = true;
  int first_violated = -1;  // index into instance.constraints
};

// Throws std::invalid_argument unless model has exactly num_vars + 1 entries.
VerifyResult verify(const Instance& instance, const std::vector<bool>& model);

}  // namespace pbsat
