#include "acfb/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "acfb/errors.hpp"

namespace acfb {

std::uint32_t crc32_ieee(const unsigned char* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(bits >> (8 * i)));
  }
  void raw(const char* s, std::size_t n) { buf_.insert(buf_.end(), s, s + n); }
  const std::vector<unsigned char>& bytes() const { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  Reader(std::vector<unsigned char> data) : data_(std::move(data)) {}

  std::size_t offset() const { return pos_; }
  std::size_t size() const { return data_.size(); }
  const unsigned char* data() const { return data_.data(); }

  void need(std::size_t n, const char* what) const {
    if (pos_ + n > data_.size()) throw FormatError(std::string("truncated file reading ") + what, data_.size());
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return data_[pos_++];
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

 private:
  std::vector<unsigned char> data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_snapshot(const VectorField& f, const std::string& path) {
  Writer w;
  w.raw("ACFB", 4);
  w.u16(1);
  w.u8(static_cast<std::uint8_t>(f.spec.n));
  w.u8(static_cast<std::uint8_t>(f.m));
  for (int d = 0; d < f.spec.n; ++d) w.u32(static_cast<std::uint32_t>(f.spec.extents[d]));
  w.f64(f.spec.h);
  for (int d = 0; d < f.spec.n; ++d) w.f64(f.spec.origin[d]);
  w.f64(f.meta.alpha);
  const int nw = f.meta.m > 0 ? static_cast<int>(f.meta.wells.size()) / f.m : 0;
  w.u16(static_cast<std::uint16_t>(nw));
  for (double v : f.meta.wells) w.f64(v);
  for (double v : f.values) w.f64(v);
  const Index nn = f.spec.num_nodes();
  for (Index i = 0; i < nn; i += 8) {
    std::uint8_t b = 0;
    for (int k = 0; k < 8 && i + k < nn; ++k)
      if (f.frozen[i + k]) b |= static_cast<std::uint8_t>(1u << k);
    w.u8(b);
  }
  const std::uint32_t crc = crc32_ieee(w.bytes().data(), w.bytes().size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
  unsigned char tail[4];
  for (int i = 0; i < 4; ++i) tail[i] = static_cast<unsigned char>(crc >> (8 * i));
  out.write(reinterpret_cast<const char*>(tail), 4);
  if (!out) throw Error("write failed: " + path);
}

VectorField load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Reader r(std::move(data));

  r.need(4, "magic");
  if (std::memcmp(r.data(), "ACFB", 4) != 0) throw FormatError("bad magic", 0);
  for (int i = 0; i < 4; ++i) (void)r.u8("magic");
  const std::uint16_t version = r.u16("version");
  if (version != 1) throw FormatError("unsupported version " + std::to_string(version), 4);

  VectorField f;
  f.spec.n = r.u8("n");
  f.m = r.u8("m");
  if (f.spec.n < 1 || f.spec.n > kMaxAxes || f.m < 1 || f.m > kMaxComponents)
    throw FormatError("implausible dimensions", 6);
  for (int d = 0; d < f.spec.n; ++d) f.spec.extents[d] = static_cast<int>(r.u32("extents"));
  f.spec.h = r.f64("h");
  for (int d = 0; d < f.spec.n; ++d) f.spec.origin[d] = r.f64("origin");
  f.meta.alpha = r.f64("alpha");
  f.meta.m = f.m;
  const int nw = r.u16("wells");
  f.meta.wells.resize(static_cast<std::size_t>(nw) * f.m);
  for (auto& v : f.meta.wells) v = r.f64("well coordinates");
  f.spec.validate();

  const Index nn = f.spec.num_nodes();
  f.values.resize(static_cast<std::size_t>(nn) * f.m);
  for (auto& v : f.values) v = r.f64("values");
  f.frozen.assign(static_cast<std::size_t>(nn), 0);
  for (Index i = 0; i < nn; i += 8) {
    const std::uint8_t b = r.u8("mask");
    for (int k = 0; k < 8 && i + k < nn; ++k) f.frozen[i + k] = (b >> k) & 1u;
  }

  const std::size_t payload = r.offset();
  r.need(4, "checksum");
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i)
    stored |= static_cast<std::uint32_t>(r.data()[payload + i]) << (8 * i);
  if (crc32_ieee(r.data(), payload) != stored)
    throw FormatError("checksum mismatch", payload);

  f.meta.field_bound = f.max_abs_value();
  return f;
}

}  // namespace acfb
