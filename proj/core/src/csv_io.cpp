#include "varboot/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace varboot {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

struct TwoColumns {
  std::vector<std::string> labels;
  std::vector<double> values;
};

TwoColumns load_two_columns(const std::string& path, const CsvColumns& columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++line_no;
  std::vector<std::string> header = split_csv_line(line);
  std::size_t date_idx = header.size(), value_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == columns.date) date_idx = i;
    if (header[i] == columns.value) value_idx = i;
  }
  if (date_idx == header.size() || value_idx == header.size()) {
    throw ParseError("header must contain columns '" + columns.date + "' and '" +
                         columns.value + "'",
                     1);
  }

  TwoColumns out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() <= std::max(date_idx, value_idx)) {
      throw ParseError("row has too few fields", line_no);
    }
    const std::string& raw = fields[value_idx];
    char* end = nullptr;
    double value = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0' || !std::isfinite(value)) {
      throw ParseError("cannot parse numeric field '" + raw + "'", line_no);
    }
    out.labels.push_back(fields[date_idx]);
    out.values.push_back(value);
  }
  return out;
}

}  // namespace

void validate(const PriceSeries& prices) {
  if (prices.dates.size() != prices.closes.size()) {
    throw std::invalid_argument("PriceSeries: date/close length mismatch");
  }
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices.closes[i] > 0.0) || !std::isfinite(prices.closes[i])) {
      throw std::invalid_argument("PriceSeries: non-positive close at row " +
                                  std::to_string(i + 1) + " (" + prices.dates[i] + ")");
    }
    if (i > 0) {
      if (prices.dates[i] == prices.dates[i - 1]) {
        throw std::invalid_argument("PriceSeries: duplicate date " + prices.dates[i]);
      }
      if (prices.dates[i] < prices.dates[i - 1]) {
        throw std::invalid_argument("PriceSeries: dates out of order at " +
                                    prices.dates[i]);
      }
    }
  }
}

PriceSeries load_prices(const std::string& path, const CsvColumns& columns) {
  TwoColumns cols = load_two_columns(path, columns);
  PriceSeries prices{std::move(cols.labels), std::move(cols.values)};
  validate(prices);
  return prices;
}

ReturnSeries to_returns(const PriceSeries& prices) {
  return to_dated_returns(prices).returns;
}

DatedReturns to_dated_returns(const PriceSeries& prices) {
  validate(prices);
  if (prices.size() < 2) {
    throw std::invalid_argument("to_returns: need at least two prices");
  }
  DatedReturns out;
  out.dates.reserve(prices.size() - 1);
  out.returns.values.reserve(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i) {
    out.dates.push_back(prices.dates[i]);
    out.returns.values.push_back(100.0 * std::log(prices.closes[i] / prices.closes[i - 1]));
  }
  return out;
}

void write_returns_csv(const std::string& path, const DatedReturns& returns) {
  if (returns.dates.size() != returns.returns.size()) {
    throw std::invalid_argument("write_returns_csv: date/return length mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "date,return\n";
  char buf[48];
  for (std::size_t i = 0; i < returns.dates.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", returns.returns.values[i]);
    out << returns.dates[i] << ',' << buf << '\n';
  }
}

DatedReturns load_returns(const std::string& path, const CsvColumns& columns) {
  TwoColumns cols = load_two_columns(path, columns);
  DatedReturns out;
  out.dates = std::move(cols.labels);
  out.returns.values = std::move(cols.values);
  validate(out.returns, 1);
  return out;
}

}  // namespace varboot
