#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "bih/spectral.hpp"

namespace bih {

namespace {

constexpr char kMagic[8] = {'B', 'I', 'H', 'S', 'N', 'A', 'P', '1'};
constexpr uint32_t kVersion = 1;

struct Writer {
  std::string buf;
  template <class T>
  void pod(const T& v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void str(const std::string& s) {
    pod<uint64_t>(s.size());
    buf.append(s);
  }
  void raw(const void* p, size_t n) { buf.append(static_cast<const char*>(p), n); }
};

struct Reader {
  const std::string& buf;
  size_t pos = 0;
  void need(size_t n) {
    if (pos + n > buf.size()) throw ConfigError("snapshot: truncated payload");
  }
  template <class T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<uint64_t>();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  void raw(void* p, size_t n) {
    need(n);
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  }
};

}  // namespace

std::string sha256_hex(const void* data, size_t n) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, n, md, &len, EVP_sha256(), nullptr) != 1) throw Error(Status::solver, "sha256 failed");
  std::string hex;
  for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string save_snapshot(const EigenData& d, const std::string& path) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.pod(kVersion);
  w.str(d.grid_hash);
  w.str(d.coef_hash);
  w.pod<int64_t>(d.K());
  w.pod<int64_t>(d.phi.rows());
  w.pod<int64_t>(d.traces.rows());
  w.raw(d.lambda.data(), sizeof(double) * d.lambda.size());
  w.raw(d.phi.data(), sizeof(cplx) * d.phi.size());
  w.raw(d.traces.data(), sizeof(cplx) * d.traces.size());
  const std::string h = sha256_hex(w.buf.data(), w.buf.size());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("snapshot: cannot write " + path);
  f.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
  f.write(h.data(), static_cast<std::streamsize>(h.size()));
  return h;
}

EigenData load_snapshot(const std::string& path, std::string* content_hash) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("snapshot: cannot open " + path);
  std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (all.size() < 64 + sizeof kMagic) throw ConfigError("snapshot: file too short");
  const std::string stored = all.substr(all.size() - 64);
  all.resize(all.size() - 64);
  const std::string h = sha256_hex(all.data(), all.size());
  if (h != stored) throw ConfigError("snapshot: content hash mismatch in " + path);
  if (std::memcmp(all.data(), kMagic, sizeof kMagic) != 0) throw ConfigError("snapshot: bad magic");

  Reader r{all, sizeof kMagic};
  if (r.pod<uint32_t>() != kVersion) throw ConfigError("snapshot: unsupported version");
  EigenData d;
  d.grid_hash = r.str();
  d.coef_hash = r.str();
  const auto K = r.pod<int64_t>(), N = r.pod<int64_t>(), M = r.pod<int64_t>();
  if (K < 0 || N < 0 || M < 0) throw ConfigError("snapshot: bad dimensions");
  d.lambda.resize(K);
  d.phi.resize(N, K);
  d.traces.resize(M, K);
  r.raw(d.lambda.data(), sizeof(double) * K);
  r.raw(d.phi.data(), sizeof(cplx) * N * K);
  r.raw(d.traces.data(), sizeof(cplx) * M * K);
  if (content_hash) *content_hash = h;
  return d;
}

}  // namespace bih
