#include "approxreg/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "approxreg/errors.hpp"

namespace approxreg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  in.read(bytes.data(), sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (rows.empty() && table.header.empty()) {
      width = cells.size();
      bool numeric = true;
      for (auto c : cells) numeric = numeric && parse_number(c).has_value();
      if (!numeric) {
        for (auto c : cells) table.header.push_back(unquote(c));
        continue;
      }
    }
    if (cells.size() != width) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                      " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw DataError("line " + std::to_string(line_no) + ", field " + std::to_string(c + 1) +
                        ": not a number: '" + std::string(cells[c]) + "'");
      }
      row[c] = *v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no numeric rows in CSV input");
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return parse_csv(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_csv(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& values,
               const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
  }
  char buf[32];
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", values(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

ColumnBlockWriter::ColumnBlockWriter(const std::string& path, std::size_t rows)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path), rows_(rows) {
  if (!out_) throw DataError("cannot create " + path);
  out_.write(kColumnBlockMagic, sizeof kColumnBlockMagic);
  put_le<std::uint32_t>(out_, kColumnBlockVersion);
  put_le<std::uint32_t>(out_, 0);
  put_le<std::uint64_t>(out_, rows_);
  put_le<std::uint64_t>(out_, 0);
}

ColumnBlockWriter::~ColumnBlockWriter() {
  try {
    close();
  } catch (...) {
  }
}

void ColumnBlockWriter::append(const Eigen::Ref<const Eigen::VectorXd>& column) {
  if (closed_) throw UsageError("column block file already closed");
  if (static_cast<std::size_t>(column.size()) != rows_) {
    throw UsageError("column length does not match the block row count");
  }
  if constexpr (std::endian::native == std::endian::little) {
    out_.write(reinterpret_cast<const char*>(column.data()),
               static_cast<std::streamsize>(rows_ * sizeof(double)));
  } else {
    for (Eigen::Index i = 0; i < column.size(); ++i) put_le<double>(out_, column(i));
  }
  ++columns_;
}

void ColumnBlockWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.seekp(24);
  put_le<std::uint64_t>(out_, columns_);
  out_.close();
  if (!out_) throw DataError("failed writing " + path_);
}

ColumnBlockReader::ColumnBlockReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw DataError("cannot open " + path);
  char magic[8];
  in_.read(magic, sizeof magic);
  if (!in_ || std::memcmp(magic, kColumnBlockMagic, sizeof magic) != 0) {
    throw DataError(path + ": not a column-block file");
  }
  const auto version = get_le<std::uint32_t>(in_);
  if (version != kColumnBlockVersion) {
    throw DataError(path + ": unsupported layout version " + std::to_string(version));
  }
  get_le<std::uint32_t>(in_);
  rows_ = get_le<std::uint64_t>(in_);
  columns_ = get_le<std::uint64_t>(in_);
  if (!in_) throw DataError(path + ": truncated header");
}

Eigen::VectorXd ColumnBlockReader::column(std::size_t j) {
  if (j < 1 || j > columns_) throw UsageError("column " + std::to_string(j) + " out of range");
  in_.clear();
  in_.seekg(static_cast<std::streamoff>(kColumnBlockHeaderBytes + (j - 1) * rows_ * sizeof(double)));
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows_));
  for (std::size_t i = 0; i < rows_; ++i) out(static_cast<Eigen::Index>(i)) = get_le<double>(in_);
  if (!in_) throw DataError(path_ + ": truncated column data");
  return out;
}

Eigen::MatrixXd ColumnBlockReader::read_all() {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(columns_));
  for (std::size_t j = 1; j <= columns_; ++j) out.col(static_cast<Eigen::Index>(j - 1)) = column(j);
  return out;
}

void write_decode_table(std::ostream& out, const InteractionIndex& index) {
  out << "column";
  for (std::size_t f = 1; f <= index.max_degree(); ++f) out << ",f" << f;
  out << '\n';
  for (std::size_t c = 1; c <= index.columns(); ++c) {
    const auto factors = index.decode(c);
    out << c;
    for (std::size_t f = 0; f < index.max_degree(); ++f) {
      out << ',' << (f < factors.size() ? factors[f] : 0);
    }
    out << '\n';
  }
}

}  // namespace approxreg
