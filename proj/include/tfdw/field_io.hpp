#pragma once

// Text serialization of fields:
//
//   TFDW-FIELD 1
//   lo: x y z
//   dims: n1 n2 n3
//   kind: euclidean|graph
//   <n1*n2*n3 values, lexicographic order, one per line>
//
// Values are written in shortest round-trip decimal form.

#include <iosfwd>
#include <string>

#include "tfdw/energy.hpp"

namespace tfdw {

struct StoredField {
  FieldGrid field;
  DistanceKind kind = DistanceKind::Euclidean;
};

void write_field(std::ostream& out, const FieldGrid& field, DistanceKind kind);
StoredField read_field(std::istream& in);

void save_field(const std::string& path, const FieldGrid& field, DistanceKind kind);
StoredField load_field(const std::string& path);

/// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

}  // namespace tfdw
