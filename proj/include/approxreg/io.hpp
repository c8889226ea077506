#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "approxreg/features.hpp"

namespace approxreg {

// Numeric CSV: comma separated, '.' decimal point, optional single header row
// detected by a non-numeric first row. Ragged rows and non-numeric cells raise
// DataError with the offending line.
struct CsvTable {
  Eigen::MatrixXd values;
  std::vector<std::string> header;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

// Values are written with 17 significant digits, so they read back exactly.
void write_csv(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& values,
               const std::vector<std::string>& header = {});

// Binary column-block file for large generated designs. Layout, all
// little-endian:
//   bytes 0-7   magic "AXRCOLS\0"
//   bytes 8-11  uint32 layout version (1)
//   bytes 12-15 uint32 reserved (0)
//   bytes 16-23 uint64 rows n
//   bytes 24-31 uint64 columns q
//   then q columns of n float64 values, column after column.
inline constexpr char kColumnBlockMagic[8] = {'A', 'X', 'R', 'C', 'O', 'L', 'S', '\0'};
inline constexpr std::uint32_t kColumnBlockVersion = 1;
inline constexpr std::size_t kColumnBlockHeaderBytes = 32;

class ColumnBlockWriter {
 public:
  ColumnBlockWriter(const std::string& path, std::size_t rows);
  ColumnBlockWriter(const ColumnBlockWriter&) = delete;
  ColumnBlockWriter& operator=(const ColumnBlockWriter&) = delete;
  ~ColumnBlockWriter();

  void append(const Eigen::Ref<const Eigen::VectorXd>& column);
  std::size_t columns() const { return columns_; }
  // Writes the final column count and closes the file.
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t rows_;
  std::size_t columns_ = 0;
  bool closed_ = false;
};

class ColumnBlockReader {
 public:
  explicit ColumnBlockReader(const std::string& path);

  std::size_t rows() const { return rows_; }
  std::size_t columns() const { return columns_; }
  // 1-based column.
  Eigen::VectorXd column(std::size_t j);
  Eigen::MatrixXd read_all();

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t rows_ = 0;
  std::size_t columns_ = 0;
};

// Sidecar decode table: header "column,f1,..,fd", one row per column with its
// ascending factors padded with zeros to d entries.
void write_decode_table(std::ostream& out, const InteractionIndex& index);

}  // namespace approxreg
