#include "horizon/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace horizon::io {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_annotation_csv(const kitti::SequenceAnnotation& annotation,
                          const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw IoError("cannot write " + path.string());
  out << "frame_index,omega_px,theta_rad,l0,l1,l2\n";
  for (const auto& frame : annotation.frames) {
    out << frame.frame_index << ',' << format_double(frame.params.omega) << ','
        << format_double(frame.params.theta) << ','
        << format_double(frame.line.l.x) << ',' << format_double(frame.line.l.y)
        << ',' << format_double(frame.line.l.z) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

kitti::SequenceAnnotation read_annotation_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  kitti::SequenceAnnotation ann;
  ann.sequence_id = path.stem().string();
  std::string line;
  if (!std::getline(in, line))
    throw IoError("empty annotation file: " + path.string());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 6)
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": expected 6 columns");
    kitti::AnnotatedFrame frame;
    frame.frame_index = std::stoi(fields[0]);
    frame.params.omega = std::stod(fields[1]);
    frame.params.theta = std::stod(fields[2]);
    frame.line.l = Vec3{std::stod(fields[3]), std::stod(fields[4]),
                        std::stod(fields[5])};
    ann.frames.push_back(frame);
  }
  return ann;
}

kitti::SplitSpec load_split_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc = json::parse(in);
  kitti::SplitSpec spec;
  for (auto& [id, entry] : doc.items()) {
    kitti::SequenceSplit sseq;
    sseq.split = kitti::split_from_string(entry.at("split").get<std::string>());
    if (entry.contains("ranges")) {
      for (auto& range : entry.at("ranges")) {
        kitti::RangeOverride ro;
        ro.split = kitti::split_from_string(range.at("split").get<std::string>());
        ro.first = range.at("first").get<int>();
        ro.last = range.at("last").get<int>();
        if (ro.last < ro.first)
          throw BadConfig("split range with last < first for " + id);
        sseq.ranges.push_back(ro);
      }
      for (std::size_t i = 0; i < sseq.ranges.size(); ++i)
        for (std::size_t j = i + 1; j < sseq.ranges.size(); ++j)
          if (sseq.ranges[i].first <= sseq.ranges[j].last &&
              sseq.ranges[j].first <= sseq.ranges[i].last)
            throw BadConfig("overlapping split ranges for " + id);
    }
    spec.assignment[id] = std::move(sseq);
  }
  return spec;
}

void save_split_spec(const kitti::SplitSpec& spec, const fs::path& path) {
  json doc = json::object();
  for (const auto& [id, sseq] : spec.assignment) {
    json entry;
    entry["split"] = kitti::to_string(sseq.split);
    if (!sseq.ranges.empty()) {
      json ranges = json::array();
      for (const auto& ro : sseq.ranges)
        ranges.push_back({{"split", kitti::to_string(ro.split)},
                          {"first", ro.first},
                          {"last", ro.last}});
      entry["ranges"] = std::move(ranges);
    }
    doc[id] = std::move(entry);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_checkpoint(const nn::ParamStore& params, const fs::path& path) {
  json doc;
  doc["format"] = "horizon-checkpoint";
  doc["version"] = kCheckpointVersion;
  json entries = json::object();
  for (const auto& p : params.all()) {
    json entry;
    entry["shape"] = p.value.shape();
    json data = json::array();
    for (std::int64_t i = 0; i < p.value.size(); ++i) data.push_back(p.value[i]);
    entry["data"] = std::move(data);
    entries[p.name] = std::move(entry);
  }
  doc["params"] = std::move(entries);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump() << '\n';
}

void load_checkpoint(nn::ParamStore& params, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc = json::parse(in);
  if (doc.value("format", "") != "horizon-checkpoint" ||
      doc.value("version", -1) != kCheckpointVersion)
    throw IoError("not a horizon checkpoint (v" +
                  std::to_string(kCheckpointVersion) + "): " + path.string());
  for (auto& p : params.all()) {
    if (!doc["params"].contains(p.name))
      throw IoError("checkpoint missing parameter " + p.name);
    const json& entry = doc["params"][p.name];
    auto shape = entry.at("shape").get<std::vector<int>>();
    if (shape != p.value.shape())
      throw ShapeMismatch("checkpoint shape differs for " + p.name);
    const json& data = entry.at("data");
    if (static_cast<std::int64_t>(data.size()) != p.value.size())
      throw ShapeMismatch("checkpoint size differs for " + p.name);
    for (std::int64_t i = 0; i < p.value.size(); ++i)
      p.value[i] = data[static_cast<std::size_t>(i)].get<double>();
  }
}

void save_metrics_report(const metrics::MetricsReport& report,
                         const fs::path& path) {
  json doc;
  doc["horizon_auc"] = report.horizon_auc;
  doc["mse"] = report.mse;
  doc["a_tv"] = report.a_tv;
  doc["pose_auc"] = report.pose_auc;
  json per_seq = json::object();
  for (const auto& [id, m] : report.per_sequence) {
    per_seq[id] = {{"horizon_auc", m.horizon_auc},
                   {"mse", m.mse},
                   {"a_tv", m.a_tv},
                   {"pose_auc", m.pose_auc},
                   {"frames", m.frames}};
  }
  doc["per_sequence"] = std::move(per_seq);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

void write_histogram_csv(
    const std::vector<std::pair<double, double>>& histogram,
    const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "error,cdf\n";
  for (const auto& [error, cdf] : histogram)
    out << format_double(error) << ',' << format_double(cdf) << '\n';
}

}  // namespace horizon::io
