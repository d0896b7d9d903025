#include <cstdint>
#include <cstring>
#include <fstream>

#include "simplechar/fields.hpp"

namespace simplechar {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'F', 'D'};
constexpr uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("field file truncated");
  return v;
}

void write_one(std::ostream& os, const GridField& f) {
  os.write(kMagic, 4);
  put<uint16_t>(os, kVersion);
  put<uint16_t>(os, static_cast<uint16_t>(f.n));
  uint8_t sp = 0;
  switch (f.space) {
    case Space::Physical: sp = 0; break;
    case Space::Frequency: sp = 1; break;
    case Space::Mixed: sp = static_cast<uint8_t>(2 + f.mixed_axis); break;
  }
  put<uint8_t>(os, sp);
  for (int a = 0; a < f.n; ++a) put<uint64_t>(os, static_cast<uint64_t>(f.dims[a]));
  for (int a = 0; a < f.n; ++a) {
    put<double>(os, -0.5 * f.box[a]);
    put<double>(os, 0.5 * f.box[a]);
  }
  for (const cplx& z : f.data) {
    put<double>(os, z.real());
    put<double>(os, z.imag());
  }
}

GridField read_one(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw ConfigError("bad field file magic");
  uint16_t ver = get<uint16_t>(is);
  if (ver != kVersion) throw ConfigError("unsupported field file version");
  int n = get<uint16_t>(is);
  uint8_t sp = get<uint8_t>(is);
  std::vector<int> dims(n);
  for (int a = 0; a < n; ++a) dims[a] = static_cast<int>(get<uint64_t>(is));
  std::vector<double> box(n);
  for (int a = 0; a < n; ++a) {
    double lo = get<double>(is), hi = get<double>(is);
    box[a] = hi - lo;
  }
  Space space = Space::Physical;
  int axis = -1;
  if (sp == 1)
    space = Space::Frequency;
  else if (sp >= 2) {
    space = Space::Mixed;
    axis = sp - 2;
  }
  GridField f = GridField::zeros(dims, box, space, axis);
  for (cplx& z : f.data) {
    double re = get<double>(is), im = get<double>(is);
    z = cplx(re, im);
  }
  return f;
}

}  // namespace

void write_field(const std::string& path, const GridField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  write_one(os, f);
}

GridField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  return read_one(is);
}

void write_fields(const std::string& path, const std::vector<GridField>& fs) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  for (const GridField& f : fs) write_one(os, f);
}

std::vector<GridField> read_fields(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  std::vector<GridField> out;
  while (is.peek() != EOF) out.push_back(read_one(is));
  return out;
}

}  // namespace simplechar
