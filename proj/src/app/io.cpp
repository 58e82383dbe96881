#include "tgf/app/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <stdexcept>

namespace tgf::app {

static_assert(std::endian::native == std::endian::little, "binary records assume a little-endian host");

const char* version() { return TGF_VERSION; }

std::string fmt(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, p) : std::string("nan");
}

Output::Output(std::filesystem::path dir, std::string command, std::string hash)
    : dir_(std::move(dir)), command_(std::move(command)), hash_(std::move(hash)) {
  std::filesystem::create_directories(dir_);
}

std::ofstream Output::open(const std::string& name, bool binary) {
  std::ofstream f(dir_ / name, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
  files_.push_back(name);
  return f;
}

void Output::csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  auto f = open(name, false);
  f << "# config_hash=" << hash_ << ", version=" << version() << ", command=" << command_ << "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
    f << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

void Output::json(const std::string& name, nlohmann::json body) {
  body["config_hash"] = hash_;
  body["version"] = version();
  body["command"] = command_;
  auto f = open(name, false);
  f << body.dump(2) << "\n";
}

namespace {

template <class T>
void put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!f) throw std::runtime_error("truncated coefficient file");
  return v;
}

}  // namespace

void Output::fields(const std::string& name, const WaveGrid& grid, double dt, const std::vector<SpectralField>& records) {
  auto f = open(name, true);
  f.write("TGFCOEF1", 8);
  put<std::uint32_t>(f, static_cast<std::uint32_t>(grid.dim()));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(grid.n_max()));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(records.empty() ? 0 : records.size() - 1));
  put<double>(f, dt);
  put<std::uint32_t>(f, static_cast<std::uint32_t>(records.size()));
  put<std::uint32_t>(f, static_cast<std::uint32_t>(grid.dim()));
  put<std::uint64_t>(f, grid.mode_count());
  std::string h = hash_;
  h.resize(64, ' ');
  f.write(h.data(), 64);
  const std::string v = version();
  put<std::uint32_t>(f, static_cast<std::uint32_t>(v.size()));
  f.write(v.data(), static_cast<std::streamsize>(v.size()));
  for (const auto& r : records)
    for (int a = 0; a < grid.dim(); ++a)
      for (const auto& c : r.component(a)) {
        put<double>(f, c.real());
        put<double>(f, c.imag());
      }
}

void Output::manifest(const nlohmann::json& config) {
  nlohmann::json m;
  m["config"] = config;
  m["files"] = files_;
  json("manifest.json", m);
}

FieldRecords read_field_records(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  char magic[8];
  f.read(magic, 8);
  if (!f || std::string(magic, 8) != "TGFCOEF1") throw std::runtime_error("not a coefficient file: " + path.string());
  FieldRecords r;
  r.dim = static_cast<int>(get<std::uint32_t>(f));
  r.n_max = static_cast<int>(get<std::uint32_t>(f));
  r.steps = static_cast<int>(get<std::uint32_t>(f));
  r.dt = get<double>(f);
  const auto n = get<std::uint32_t>(f);
  const auto comps = get<std::uint32_t>(f);
  const auto modes = get<std::uint64_t>(f);
  std::string h(64, ' ');
  f.read(h.data(), 64);
  r.hash = h.substr(0, h.find_last_not_of(' ') + 1);
  std::string v(get<std::uint32_t>(f), '\0');
  f.read(v.data(), static_cast<std::streamsize>(v.size()));
  r.version = v;
  const WaveGrid g(r.dim, r.n_max);
  if (comps != static_cast<std::uint32_t>(r.dim) || modes != g.mode_count())
    throw std::runtime_error("coefficient file does not match its grid header");
  for (std::uint32_t i = 0; i < n; ++i) {
    SpectralField u(g);
    for (int a = 0; a < r.dim; ++a)
      for (auto& c : u.component(a)) {
        const double re = get<double>(f);
        const double im = get<double>(f);
        c = Complex(re, im);
      }
    r.records.push_back(std::move(u));
  }
  return r;
}

}  // namespace tgf::app
