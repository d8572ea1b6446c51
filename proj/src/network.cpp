#include "blockstab/network.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "blockstab/error.hpp"

namespace blockstab {

void validate_periods(const std::vector<PeriodSpec>& periods) {
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const auto& p = periods[i];
    if (p.start_year > p.end_year) {
      throw Error(ErrorKind::invalid_argument, "period '" + p.label + "' ends before it starts");
    }
    if (i > 0 && periods[i - 1].end_year >= p.start_year) {
      throw Error(ErrorKind::invalid_argument,
                  "period '" + p.label + "' overlaps or precedes '" + periods[i - 1].label + "'");
    }
  }
}

Network::Network(std::vector<std::string> vertices)
    : vertices_(std::move(vertices)), weights_(vertices_.size() * vertices_.size(), 0) {}

void Network::add_tie(std::size_t i, std::size_t j, std::uint32_t w) {
  if (i == j) throw Error(ErrorKind::invalid_argument, "self-loop on " + vertices_.at(i));
  const std::size_t n = size();
  weights_.at(i * n + j) += w;
  weights_.at(j * n + i) += w;
}

std::size_t Network::degree(std::size_t i) const {
  const std::size_t n = size();
  return static_cast<std::size_t>(std::count_if(weights_.begin() + i * n, weights_.begin() + (i + 1) * n,
                                                [](std::uint32_t w) { return w > 0; }));
}

std::size_t Network::edge_count() const {
  std::size_t twice = 0;
  for (auto w : weights_) twice += (w > 0);
  return twice / 2;
}

std::optional<std::size_t> Network::index_of(const std::string& id) const {
  auto it = std::find(vertices_.begin(), vertices_.end(), id);
  if (it == vertices_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

namespace {

std::vector<std::string> split_row(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

std::vector<PublicationRecord> parse_publications(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  char sep = ',';
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    sep = line.find('\t') != std::string::npos ? '\t' : ',';
    header = split_row(line, sep);
    break;
  }
  if (header.empty()) throw Error(ErrorKind::parse, "missing header row");

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto pub_col = column("pub_id");
  auto author_col = column("author_id");
  auto year_col = column("year");
  if (!pub_col || !author_col || !year_col) {
    throw Error(ErrorKind::parse, "header must contain pub_id, author_id and year");
  }
  auto disc_col = column("discipline");
  auto field_col = column("field");

  std::vector<PublicationRecord> records;
  std::map<std::string, std::size_t> by_id;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells = split_row(line, sep);
    if (cells.size() < header.size()) parse_fail(line_no, "expected " + std::to_string(header.size()) + " fields");
    const std::string& pub = cells[*pub_col];
    const std::string& author = cells[*author_col];
    const std::string& year_text = cells[*year_col];
    if (pub.empty()) parse_fail(line_no, "empty pub_id");
    if (author.empty()) parse_fail(line_no, "empty author_id");
    int year = 0;
    auto [ptr, ec] = std::from_chars(year_text.data(), year_text.data() + year_text.size(), year);
    if (ec != std::errc{} || ptr != year_text.data() + year_text.size()) {
      parse_fail(line_no, "year '" + year_text + "' is not an integer");
    }
    std::string discipline = disc_col ? cells[*disc_col] : std::string{};
    std::string field = field_col ? cells[*field_col] : std::string{};

    auto [it, inserted] = by_id.try_emplace(pub, records.size());
    if (inserted) {
      records.push_back({pub, {}, year, std::move(discipline), std::move(field)});
    } else {
      const auto& rec = records[it->second];
      if (rec.year != year) parse_fail(line_no, "publication " + pub + " has conflicting years");
      if (rec.discipline != discipline) parse_fail(line_no, "publication " + pub + " has conflicting disciplines");
    }
    records[it->second].author_ids.push_back(author);
  }
  for (auto& rec : records) {
    std::sort(rec.author_ids.begin(), rec.author_ids.end());
    rec.author_ids.erase(std::unique(rec.author_ids.begin(), rec.author_ids.end()), rec.author_ids.end());
  }
  return records;
}

Network build_network(const std::vector<PublicationRecord>& records, const PeriodSpec& period,
                      const std::optional<std::set<std::string>>& roster) {
  std::vector<std::vector<std::string>> groups;
  std::set<std::string> ids;
  for (const auto& rec : records) {
    if (!period.contains(rec.year)) continue;
    std::vector<std::string> authors;
    for (const auto& a : rec.author_ids) {
      if (!roster || roster->count(a)) authors.push_back(a);
    }
    ids.insert(authors.begin(), authors.end());
    if (authors.size() >= 2) groups.push_back(std::move(authors));
  }
  if (ids.empty()) {
    throw Error(ErrorKind::empty_network, "no authors publish in period '" + period.label + "'");
  }
  Network net(std::vector<std::string>(ids.begin(), ids.end()));
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < net.size(); ++i) index.emplace(net.label(i), i);
  for (const auto& g : groups) {
    for (std::size_t x = 0; x < g.size(); ++x) {
      for (std::size_t y = x + 1; y < g.size(); ++y) net.add_tie(index.at(g[x]), index.at(g[y]));
    }
  }
  return net;
}

double density(const Network& net) {
  const double n = static_cast<double>(net.size());
  if (net.size() < 2) throw Error(ErrorKind::undefined_value, "density needs at least two vertices");
  return 2.0 * static_cast<double>(net.edge_count()) / (n * (n - 1.0));
}

std::vector<std::string> isolates(const Network& net) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net.degree(i) == 0) out.push_back(net.label(i));
  }
  return out;
}

Network induced_subnetwork(const Network& net, const std::set<std::string>& keep) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (keep.count(net.label(i))) kept.push_back(i);
  }
  if (kept.size() != keep.size()) {
    for (const auto& id : keep) {
      if (!net.index_of(id)) throw Error(ErrorKind::invalid_argument, "unknown vertex '" + id + "'");
    }
  }
  std::vector<std::string> labels;
  for (auto i : kept) labels.push_back(net.label(i));
  Network sub(std::move(labels));
  for (std::size_t a = 0; a < kept.size(); ++a) {
    for (std::size_t b = a + 1; b < kept.size(); ++b) {
      if (auto w = net.weight(kept[a], kept[b])) sub.add_tie(a, b, w);
    }
  }
  return sub;
}

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (std::size_t j = i + 1; j < net.size(); ++j) {
      if (net.adjacent(i, j)) edges.push_back({i, j, net.weight(i, j)});
    }
  }
  return {{"vertices", net.vertices()}, {"edges", std::move(edges)}};
}

Network network_from_json(const nlohmann::json& doc) {
  try {
    Network net(doc.at("vertices").get<std::vector<std::string>>());
    for (const auto& e : doc.at("edges")) {
      auto i = e.at(0).get<std::size_t>();
      auto j = e.at(1).get<std::size_t>();
      auto w = e.at(2).get<std::uint32_t>();
      if (i >= j || j >= net.size() || w == 0) throw Error(ErrorKind::parse, "malformed edge entry");
      net.add_tie(i, j, w);
    }
    return net;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::parse, std::string("network JSON: ") + ex.what());
  }
}

}  // namespace blockstab
