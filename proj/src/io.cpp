#include "spincat/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace spincat::io {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::vector<double> parse_row(const std::string& line, std::size_t expected, const fs::path& path) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  if (v.size() != expected) throw std::runtime_error("malformed row in " + path.string() + ": " + line);
  return v;
}

// Value of key=... inside a '#' header line.
std::string header_field(const std::string& header, const std::string& key) {
  const auto pos = header.find(key + "=");
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size() + 1;
  const auto end = header.find(' ', start);
  return header.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

}  // namespace

const char* version() { return SPINCAT_VERSION; }

std::string spin_label(int twice_I) {
  return twice_I % 2 == 0 ? std::to_string(twice_I / 2) : std::to_string(twice_I) + "/2";
}

json schedule_to_json(const PulseSchedule& schedule) {
  json segs = json::array();
  for (const auto& seg : schedule.segments()) {
    json tones = json::array();
    for (const auto& t : seg.tones) tones.push_back({{"omega_hz", rad_to_hz(t.omega)}, {"eps", t.eps}, {"phi", t.phi}});
    segs.push_back({{"t_start", seg.t_start}, {"t_end", seg.t_end}, {"phase_origin", seg.phase_origin}, {"tones", tones}});
  }
  return {{"format", "spincat-schedule"}, {"version", 1}, {"segments", segs}};
}

PulseSchedule schedule_from_json(const json& doc) {
  std::vector<PulseSegment> segs;
  for (const auto& s : doc.at("segments")) {
    PulseSegment seg;
    seg.t_start = s.at("t_start").get<double>();
    seg.t_end = s.at("t_end").get<double>();
    seg.phase_origin = s.value("phase_origin", seg.t_start);
    for (const auto& t : s.at("tones")) {
      seg.tones.push_back({hz_to_rad(t.at("omega_hz").get<double>()), t.at("eps").get<double>(), t.at("phi").get<double>()});
    }
    segs.push_back(std::move(seg));
  }
  return PulseSchedule(std::move(segs));
}

void write_schedule(const fs::path& path, const PulseSchedule& schedule) { write_json(path, schedule_to_json(schedule)); }

PulseSchedule read_schedule(const fs::path& path) { return schedule_from_json(read_json(path)); }

void write_size_series(const fs::path& path, const SizeSeries& series) {
  if (series.times.size() != series.n_eff.size()) throw std::invalid_argument("size series length mismatch");
  auto out = open_out(path);
  out << "# operator=" << series.operator_tag << "\n";
  out << "t,N_eff\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) out << series.times[i] << ',' << series.n_eff[i] << '\n';
}

SizeSeries read_size_series(const fs::path& path) {
  auto in = open_in(path);
  SizeSeries s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      s.operator_tag = header_field(line, "operator");
      continue;
    }
    if (line.rfind("t,", 0) == 0) continue;
    const auto row = parse_row(line, 2, path);
    s.times.push_back(row[0]);
    s.n_eff.push_back(row[1]);
  }
  return s;
}

void write_husimi(const fs::path& path, const HusimiGrid& grid) {
  auto out = open_out(path);
  out << "# spin=" << spin_label(grid.twice_I) << " convention=" << grid.convention << " n_theta=" << grid.n_theta
      << " n_phi=" << grid.n_phi << "\n";
  out << "theta,phi,Q\n";
  for (int i = 0; i < grid.n_theta; ++i) {
    for (int k = 0; k < grid.n_phi; ++k) out << grid.theta(i) << ',' << grid.phi(k) << ',' << grid.at(i, k) << '\n';
  }
}

HusimiGrid read_husimi(const fs::path& path) {
  auto in = open_in(path);
  HusimiGrid g;
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') {
    throw std::runtime_error(path.string() + ": missing Husimi header");
  }
  const std::string spin = header_field(line, "spin");
  const auto slash = spin.find('/');
  g.twice_I = slash == std::string::npos ? 2 * std::stoi(spin) : std::stoi(spin.substr(0, slash));
  g.convention = header_field(line, "convention");
  g.n_theta = std::stoi(header_field(line, "n_theta"));
  g.n_phi = std::stoi(header_field(line, "n_phi"));
  std::getline(in, line);  // column names
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    g.values.push_back(parse_row(line, 3, path)[2]);
  }
  if (g.values.size() != static_cast<std::size_t>(g.n_theta) * g.n_phi) {
    throw std::runtime_error(path.string() + ": Husimi grid size does not match header");
  }
  return g;
}

void write_table(const fs::path& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows, const std::string& comment) {
  auto out = open_out(path);
  if (!comment.empty()) out << "# " << comment << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw std::invalid_argument("table row width does not match header");
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
    out << "\n";
  }
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace spincat::io
