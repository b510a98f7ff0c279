#include "itwf/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "itwf/errors.hpp"

namespace itwf {

std::string format_double(double v) {
  std::array<char, 64> buffer{};
  auto const [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), v);
  if (ec != std::errc()) { throw std::runtime_error("format_double: conversion failed"); }
  return std::string(buffer.data(), ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) { throw std::invalid_argument("CsvTable: empty header"); }
  append(header);
}

void CsvTable::add_row(std::vector<CsvField> const &fields) {
  if (fields.size() != columns_) {
    throw std::logic_error("CsvTable: row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(columns_));
  }
  std::vector<std::string> text;
  text.reserve(fields.size());
  for (auto const &f : fields) { text.push_back(f.text); }
  append(text);
  ++rows_;
}

void CsvTable::append(std::vector<std::string> const &fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) { text_ += ','; }
    text_ += fields[i];
  }
  text_ += '\n';
}

void CsvTable::write(std::filesystem::path const &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw IoError("cannot write " + path.string()); }
  out << text_;
  if (!out) { throw IoError("write failed for " + path.string()); }
}

} // namespace itwf
