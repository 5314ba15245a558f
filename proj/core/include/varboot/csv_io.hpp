#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "varboot/model.hpp"

namespace varboot {

/// Parse failure carrying the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Daily closing prices keyed by ISO-8601 date labels. Dates are opaque
/// but must be strictly increasing (lexicographic order); closes positive.
struct PriceSeries {
  std::vector<std::string> dates;
  std::vector<double> closes;

  std::size_t size() const { return dates.size(); }
};

void validate(const PriceSeries& prices);

struct CsvColumns {
  std::string date = "date";
  std::string value = "close";
};

/// Reads a `date,close` CSV (UTF-8, header required, column names
/// configurable). Throws ParseError with the offending line number on
/// malformed rows, std::invalid_argument on domain violations.
PriceSeries load_prices(const std::string& path, const CsvColumns& columns = {});

/// Log-returns in percent: eps_t = 100 log(p_t / p_{t-1}); length n-1.
ReturnSeries to_returns(const PriceSeries& prices);

struct DatedReturns {
  std::vector<std::string> dates;  // date of each return (the later price)
  ReturnSeries returns;
};

DatedReturns to_dated_returns(const PriceSeries& prices);

/// `date,return` CSV with full round-trip precision (%.17g).
void write_returns_csv(const std::string& path, const DatedReturns& returns);

DatedReturns load_returns(const std::string& path,
                          const CsvColumns& columns = {"date", "return"});

}  // namespace varboot
