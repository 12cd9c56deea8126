#include "rtwave/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "rtwave/common.hpp"

namespace rtwave {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), ncols_(columns.size()) {
  if (!out_) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
  out_.flush();
}

void CsvWriter::row(const std::vector<double>& values) { row({}, values); }

void CsvWriter::row(const std::vector<std::string>& labels, const std::vector<double>& values) {
  if (labels.size() + values.size() != ncols_) throw Error("CsvWriter: row width does not match the header");
  bool first = true;
  for (const auto& l : labels) {
    out_ << (first ? "" : ",") << l;
    first = false;
  }
  for (double v : values) {
    out_ << (first ? "" : ",") << format_double(v);
    first = false;
  }
  out_ << '\n';
  out_.flush();
  if (!out_) throw Error("CsvWriter: write failed");
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

namespace {

constexpr char kMagic[8] = {'R', 'T', 'W', 'C', 'K', 'P', 'T', '1'};

template <class T>
void put(std::ostream& o, T v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw DataError("checkpoint: truncated file");
  return v;
}

void put_complex(std::ostream& o, const std::vector<cplx>& v) {
  for (const cplx& c : v) {
    put(o, c.real());
    put(o, c.imag());
  }
}

void get_complex(std::istream& in, std::vector<cplx>& v) {
  for (cplx& c : v) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    c = cplx(re, im);
  }
}

}  // namespace

void write_checkpoint(const fs::path& path, const FlattenedState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const Grid& g = *s.grid();
  out.write(kMagic, sizeof kMagic);
  put<std::int32_t>(out, g.nh());
  put<std::int32_t>(out, g.nv(Layer::plus));
  put<std::int32_t>(out, g.nv(Layer::minus));
  put<double>(out, s.time);
  for (Layer l : {Layer::plus, Layer::minus}) put_complex(out, s.q.layer(l));
  for (int c = 0; c < 3; ++c)
    for (Layer l : {Layer::plus, Layer::minus}) put_complex(out, s.u[c].layer(l));
  put_complex(out, s.eta_plus.coeffs());
  put_complex(out, s.eta_minus.coeffs());
}

FlattenedState read_checkpoint(const fs::path& path, const GridPtr& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw DataError("checkpoint: bad magic");
  const int nh = get<std::int32_t>(in), np = get<std::int32_t>(in), nm = get<std::int32_t>(in);
  if (nh != grid->nh() || np != grid->nv(Layer::plus) || nm != grid->nv(Layer::minus))
    throw DataError("checkpoint: grid sizes do not match");
  FlattenedState s = FlattenedState::zero(grid);
  s.time = get<double>(in);
  for (Layer l : {Layer::plus, Layer::minus}) get_complex(in, s.q.layer(l));
  for (int c = 0; c < 3; ++c)
    for (Layer l : {Layer::plus, Layer::minus}) get_complex(in, s.u[c].layer(l));
  get_complex(in, s.eta_plus.coeffs());
  get_complex(in, s.eta_minus.coeffs());
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("checkpoint: trailing bytes");
  return s;
}

namespace {

struct Digest {
  EVP_MD_CTX* ctx;
  Digest() : ctx(EVP_MD_CTX_new()) {
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
  }
  ~Digest() { EVP_MD_CTX_free(ctx); }
  void update(const char* p, std::size_t n) {
    if (EVP_DigestUpdate(ctx, p, n) != 1) throw Error("sha256: update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, md, &len) != 1) throw Error("sha256: final failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
  }
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Digest d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  Digest d;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

StagedOutput::StagedOutput(fs::path final_dir) : final_(std::move(final_dir)) {
  fs::path parent = final_.parent_path();
  if (parent.empty()) parent = ".";
  fs::create_directories(parent);
  stage_ = parent / ("." + final_.filename().string() + ".staging");
  fs::remove_all(stage_);
  fs::create_directories(stage_);
}

StagedOutput::~StagedOutput() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(stage_, ec);
  }
}

void StagedOutput::commit(const nlohmann::json& manifest_info) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(stage_))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), stage_));
  std::sort(files.begin(), files.end());
  nlohmann::json m = manifest_info;
  m["files"] = nlohmann::json::array();
  for (const auto& f : files)
    m["files"].push_back({{"path", f.generic_string()},
                          {"bytes", fs::file_size(stage_ / f)},
                          {"sha256", sha256_file(stage_ / f)}});
  write_json(stage_ / "MANIFEST.json", m);
  fs::remove_all(final_);
  fs::rename(stage_, final_);
  committed_ = true;
}

}  // namespace rtwave
