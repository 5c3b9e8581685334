#include "tfdw/field_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tfdw {

namespace {

std::string expect_line(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("field file truncated before " + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

Point parse_triple(const std::string& line, const std::string& key) {
  const std::string prefix = key + ":";
  if (line.rfind(prefix, 0) != 0) throw FormatError("expected '" + prefix + "' line, got '" + line + "'");
  std::istringstream ss(line.substr(prefix.size()));
  Point p;
  if (!(ss >> p.x() >> p.y() >> p.z())) throw FormatError("malformed '" + key + "' line");
  return p;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_field(std::ostream& out, const FieldGrid& field, DistanceKind kind) {
  const Box& b = field.box();
  const Eigen::Vector3i d = b.dims();
  out << "TFDW-FIELD 1\n";
  out << "lo: " << b.lo.x() << ' ' << b.lo.y() << ' ' << b.lo.z() << '\n';
  out << "dims: " << d.x() << ' ' << d.y() << ' ' << d.z() << '\n';
  out << "kind: " << to_string(kind) << '\n';
  for (const double v : field.values()) out << format_double(v) << '\n';
}

StoredField read_field(std::istream& in) {
  if (expect_line(in, "header") != "TFDW-FIELD 1") throw FormatError("not a TFDW-FIELD 1 file");
  const Point lo = parse_triple(expect_line(in, "lo"), "lo");
  const Point dims = parse_triple(expect_line(in, "dims"), "dims");
  if ((dims.array() < 1).any()) throw FormatError("field dims must be positive");
  const std::string kind_line = expect_line(in, "kind");
  if (kind_line.rfind("kind: ", 0) != 0) throw FormatError("expected 'kind:' line");
  StoredField stored;
  try {
    stored.kind = parse_distance_kind(kind_line.substr(6));
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
  const Box box(lo, lo + dims - Point::Ones());
  Eigen::ArrayXd values(box.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const std::string line = expect_line(in, "value " + std::to_string(i));
    double v = 0.0;
    const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
    if (res.ec != std::errc() || res.ptr != line.data() + line.size())
      throw FormatError("malformed value on data line " + std::to_string(i));
    values[i] = v;
  }
  try {
    stored.field = FieldGrid(box, std::move(values));
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
  return stored;
}

void save_field(const std::string& path, const FieldGrid& field, DistanceKind kind) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write_field(out, field, kind);
}

StoredField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read_field(in);
}

}  // namespace tfdw
