#include "gmc/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "gmc/errors.hpp"

namespace gmc {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  add_row(header);
}

std::string CsvWriter::format_double(double v) {
  char tmp[40];
  std::snprintf(tmp, sizeof tmp, "%.17g", v);
  return tmp;
}

std::string CsvWriter::escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw DomainError("CsvWriter: column count mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += escape(cells[i]);
  }
  buf_ += "\r\n";
}

void CsvWriter::add_row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(format_double(v));
  add_row(s);
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("CsvWriter: cannot open " + path.string());
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
}

namespace {
void put_u16(std::string& b, uint16_t v) {
  b += static_cast<char>(v & 0xff);
  b += static_cast<char>((v >> 8) & 0xff);
}
void put_u64(std::string& b, uint64_t v) {
  for (int i = 0; i < 8; ++i) b += static_cast<char>((v >> (8 * i)) & 0xff);
}
}  // namespace

void write_gmcf(const std::filesystem::path& path, const GmcfHeader& header,
                const std::vector<double>& data) {
  std::string buf;
  buf.reserve(16 + data.size() * 8);
  buf += "GMCF";
  buf += static_cast<char>(header.version);
  buf += static_cast<char>(header.kind);
  put_u16(buf, header.d);
  put_u64(buf, header.count);
  for (double v : data) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(buf, bits);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("write_gmcf: cannot open " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_path_gmcf(const std::filesystem::path& path, const Path& p) {
  GmcfHeader h;
  h.kind = p.kind == Path::Kind::BM ? 1 : 2;
  h.d = 1;
  h.count = p.values.size();
  std::vector<double> data;
  data.reserve(p.values.size() + 1);
  data.push_back(p.h);
  data.insert(data.end(), p.values.begin(), p.values.end());
  write_gmcf(path, h, data);
}

Path read_path_gmcf(const std::filesystem::path& path) {
  const GmcfFile f = read_gmcf(path);
  if ((f.header.kind != 1 && f.header.kind != 2) || f.data.size() < 2)
    throw DomainError("read_path_gmcf: not a path file");
  Path p;
  p.kind = f.header.kind == 1 ? Path::Kind::BM : Path::Kind::BES3;
  p.h = f.data[0];
  p.values.assign(f.data.begin() + 1, f.data.end());
  p.start = p.values.front();
  return p;
}

GmcfFile read_gmcf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("read_gmcf: cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 16 || buf.compare(0, 4, "GMCF") != 0)
    throw DomainError("read_gmcf: bad magic");
  GmcfFile f;
  f.header.version = static_cast<uint8_t>(buf[4]);
  f.header.kind = static_cast<uint8_t>(buf[5]);
  f.header.d = static_cast<uint16_t>(static_cast<uint8_t>(buf[6]) |
                                     (static_cast<uint8_t>(buf[7]) << 8));
  uint64_t count = 0;
  for (int i = 0; i < 8; ++i)
    count |= static_cast<uint64_t>(static_cast<uint8_t>(buf[8 + i])) << (8 * i);
  f.header.count = count;
  const size_t nd = (buf.size() - 16) / 8;
  f.data.resize(nd);
  for (size_t k = 0; k < nd; ++k) {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<uint64_t>(static_cast<uint8_t>(buf[16 + 8 * k + i])) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    f.data[k] = v;
  }
  return f;
}

}  // namespace gmc
