#pragma once

#include <stdexcept>
#include <string>

#include "iquad/grid.hpp"

namespace iquad {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldKind : std::uint32_t {
  kGeneric = 0,
  kPhase = 1,
  kIntensity = 2,
  kMetaIntensity = 3,
  kDoubleDifference = 4,
  kSlopes = 5,
  kMask = 6,
};

struct StoredField {
  ScalarField field;
  FieldKind kind = FieldKind::kGeneric;
};

// 32-byte header: "IQF1", uint32 n, f64 pitch, uint32 kind, 12 reserved bytes.
// Data follows as little-endian f64, row-major.
void write_field_raw(const std::string& path, const ScalarField& f, FieldKind kind);
StoredField read_field_raw(const std::string& path, int pad_factor = 2);

void write_field_csv(const std::string& path, const ScalarField& f);

struct PngScale {
  double min = 0.0;
  double max = 0.0;
};
// 8-bit grayscale; min/max go to `path + ".txt"`. A constant field maps to gray 128.
PngScale write_field_png(const std::string& path, const ScalarField& f);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace iquad
