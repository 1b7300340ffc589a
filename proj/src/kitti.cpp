#include "horizon/kitti.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace horizon::kitti {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat3 rot_x(double a) {
  Mat3 m = Mat3::identity();
  m(1, 1) = std::cos(a);
  m(1, 2) = -std::sin(a);
  m(2, 1) = std::sin(a);
  m(2, 2) = std::cos(a);
  return m;
}

Mat3 rot_y(double a) {
  Mat3 m = Mat3::identity();
  m(0, 0) = std::cos(a);
  m(0, 2) = std::sin(a);
  m(2, 0) = -std::sin(a);
  m(2, 2) = std::cos(a);
  return m;
}

Mat3 rot_z(double a) {
  Mat3 m = Mat3::identity();
  m(0, 0) = std::cos(a);
  m(0, 1) = -std::sin(a);
  m(1, 0) = std::sin(a);
  m(1, 1) = std::cos(a);
  return m;
}

// Modified Gram-Schmidt on the rows; keeps an exact identity untouched.
Mat3 orthonormalized(const Mat3& in) {
  Vec3 r0{in(0, 0), in(0, 1), in(0, 2)};
  Vec3 r1{in(1, 0), in(1, 1), in(1, 2)};
  Vec3 r2{in(2, 0), in(2, 1), in(2, 2)};
  r0 = r0 * (1.0 / r0.norm());
  r1 = r1 - r0 * r0.dot(r1);
  r1 = r1 * (1.0 / r1.norm());
  r2 = cross(r0, r1);
  Mat3 out;
  out.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
  return out;
}

bool record_valid(const OxtsRecord& r) {
  for (double a : {r.roll, r.pitch, r.yaw}) {
    if (!std::isfinite(a)) return false;
    if (a < -kPi || a > kPi) return false;
  }
  return true;
}

}  // namespace

geom::Rotation rotation_from_rpy(double roll, double pitch, double yaw) {
  if (!std::isfinite(roll) || !std::isfinite(pitch) || !std::isfinite(yaw))
    throw Error("rotation_from_rpy: angles must be finite");
  return geom::Rotation{rot_z(yaw) * rot_y(pitch) * rot_x(roll)};
}

geom::Rotation imu_to_cam_rotation(const CalibChain& calib, int camera) {
  if (camera < 0 || camera > 3) throw BadCalibration("camera index not in 0..3");
  for (const auto* factor :
       {&calib.r_rect, &calib.r_velo_to_cam, &calib.r_imu_to_velo}) {
    if (factor->R.orthonormality_error() > 1e-6 ||
        std::fabs(factor->R.det() - 1.0) > 1e-6)
      throw BadCalibration("calibration rotation is not orthonormal");
  }
  Mat3 chain = calib.r_rect.R * calib.r_velo_to_cam.R * calib.r_imu_to_velo.R;
  return geom::Rotation{orthonormalized(chain)};
}

std::pair<geom::HomLine, geom::HorizonParams> annotate_frame(
    const geom::CameraModel& cam, const geom::Rotation& r_imu_to_cam,
    const geom::Rotation& r_imu, const geom::ImageDims& dims) {
  geom::Rotation chain{r_imu_to_cam.R * r_imu.R};
  geom::HomLine line =
      geom::horizon_from_gravity(cam, chain, geom::GravityVector{});
  geom::HorizonParams params = geom::params_from_line(line, dims);
  // store the canonical-sign form so line and params always agree
  return {geom::horizon_from_params(params, dims), params};
}

AnnotateResult annotate_sequence(const std::vector<OxtsRecord>& oxts,
                                 const CalibChain& calib, int camera,
                                 const geom::ImageDims& dims,
                                 const std::string& sequence_id) {
  if (oxts.empty()) throw EmptyInput("annotate_sequence: no records");
  geom::CameraModel cam{calib.k[static_cast<std::size_t>(camera)]};
  geom::Rotation r_imu_to_cam = imu_to_cam_rotation(calib, camera);

  AnnotateResult result;
  result.annotation.sequence_id = sequence_id;
  result.annotation.camera_index = camera;
  for (std::size_t i = 0; i < oxts.size(); ++i) {
    const OxtsRecord& rec = oxts[i];
    if (!record_valid(rec)) {
      ++result.skipped;
      continue;
    }
    try {
      auto r_imu = rotation_from_rpy(rec.roll, rec.pitch, rec.yaw);
      auto [line, params] = annotate_frame(cam, r_imu_to_cam, r_imu, dims);
      result.annotation.frames.push_back(
          {static_cast<int>(i), params, line});
    } catch (const Error&) {
      ++result.skipped;
    }
  }
  return result;
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw BadConfig("unknown split name: " + name);
}

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Partitions apply_split(const std::vector<SequenceAnnotation>& annotations,
                       const SplitSpec& spec) {
  Partitions out;
  for (const auto& ann : annotations) {
    auto it = spec.assignment.find(ann.sequence_id);
    if (it == spec.assignment.end())
      throw UnknownSequence("sequence not in split spec: " + ann.sequence_id);
    const SequenceSplit& sseq = it->second;
    if (sseq.ranges.empty()) {
      (sseq.split == Split::train
           ? out.train
           : sseq.split == Split::val ? out.val : out.test)
          .push_back(ann);
      continue;
    }
    // Distribute frames over the ranges; frames outside every range fall
    // back to the sequence-level split.
    SequenceAnnotation parts[3];
    for (auto& p : parts) {
      p.sequence_id = ann.sequence_id;
      p.camera_index = ann.camera_index;
    }
    for (const auto& frame : ann.frames) {
      Split target = sseq.split;
      for (const auto& range : sseq.ranges) {
        if (frame.frame_index >= range.first &&
            frame.frame_index <= range.last) {
          target = range.split;
          break;
        }
      }
      parts[static_cast<int>(target)].frames.push_back(frame);
    }
    if (!parts[0].frames.empty()) out.train.push_back(std::move(parts[0]));
    if (!parts[1].frames.empty()) out.val.push_back(std::move(parts[1]));
    if (!parts[2].frames.empty()) out.test.push_back(std::move(parts[2]));
  }
  return out;
}

std::vector<OxtsRecord> parse_oxts(std::istream& in) {
  std::vector<OxtsRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    OxtsRecord rec;
    std::string token;
    // strtod instead of stream extraction: "nan" fields must parse as NaN so
    // the frame can be skipped downstream rather than breaking the record
    while (ls >> token) {
      char* end = nullptr;
      double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0')
        throw IoError("OXTS record with non-numeric field: " + token);
      rec.raw.push_back(v);
    }
    if (rec.raw.size() < 6)
      throw IoError("OXTS record with fewer than 6 fields");
    rec.roll = rec.raw[3];
    rec.pitch = rec.raw[4];
    rec.yaw = rec.raw[5];
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<OxtsRecord> load_oxts(const fs::path& path) {
  fs::path data_dir = fs::is_directory(path) ? path / "data" : path;
  if (fs::is_directory(data_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(data_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<OxtsRecord> records;
    for (const auto& f : files) {
      std::ifstream in(f);
      if (!in) throw IoError("cannot open " + f.string());
      auto part = parse_oxts(in);
      records.insert(records.end(), part.begin(), part.end());
    }
    return records;
  }
  std::ifstream in(data_dir);
  if (!in) throw IoError("cannot open " + data_dir.string());
  return parse_oxts(in);
}

namespace {

// "KEY: v v v ..." lines
std::map<std::string, std::vector<double>> parse_labeled_rows(
    const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::map<std::string, std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    std::istringstream vs(line.substr(colon + 1));
    std::vector<double> values;
    double v;
    while (vs >> v) values.push_back(v);
    rows[key] = std::move(values);
  }
  return rows;
}

Mat3 mat3_from(const std::vector<double>& v, const std::string& what) {
  if (v.size() != 9) throw BadCalibration(what + ": expected 9 values");
  Mat3 m;
  std::copy(v.begin(), v.end(), m.m.begin());
  return m;
}

}  // namespace

CalibChain load_calib(const fs::path& calib_dir) {
  auto imu_rows = parse_labeled_rows(calib_dir / "calib_imu_to_velo.txt");
  auto velo_rows = parse_labeled_rows(calib_dir / "calib_velo_to_cam.txt");
  auto cam_rows = parse_labeled_rows(calib_dir / "calib_cam_to_cam.txt");

  CalibChain calib;
  calib.r_imu_to_velo.R = mat3_from(imu_rows.at("R"), "calib_imu_to_velo R");
  calib.r_velo_to_cam.R = mat3_from(velo_rows.at("R"), "calib_velo_to_cam R");
  if (!cam_rows.count("R_rect_00"))
    throw BadCalibration("calib_cam_to_cam.txt: missing R_rect_00");
  calib.r_rect.R = mat3_from(cam_rows.at("R_rect_00"), "R_rect_00");

  for (int n = 0; n < 4; ++n) {
    std::string suffix = "0" + std::to_string(n);
    auto p_it = cam_rows.find("P_rect_" + suffix);
    if (p_it == cam_rows.end() || p_it->second.size() != 12)
      throw BadCalibration("missing or malformed P_rect_" + suffix);
    const auto& p = p_it->second;
    Mat3 k;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) k(r, c) = p[static_cast<std::size_t>(r * 4 + c)];
    calib.k[static_cast<std::size_t>(n)] = k;
    auto s_it = cam_rows.find("S_rect_" + suffix);
    if (s_it != cam_rows.end() && s_it->second.size() == 2)
      calib.dims[static_cast<std::size_t>(n)] =
          geom::ImageDims{s_it->second[0], s_it->second[1]};
  }
  return calib;
}

std::vector<SequenceLocation> discover_sequences(const fs::path& root) {
  std::vector<SequenceLocation> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& day : fs::directory_iterator(root)) {
    if (!day.is_directory()) continue;
    if (!fs::exists(day.path() / "calib_cam_to_cam.txt")) continue;
    for (const auto& seq : fs::directory_iterator(day.path())) {
      if (!seq.is_directory()) continue;
      fs::path oxts = seq.path() / "oxts";
      if (!fs::exists(oxts)) continue;
      out.push_back({seq.path().filename().string(), oxts, day.path()});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SequenceLocation& a, const SequenceLocation& b) {
              return a.sequence_id < b.sequence_id;
            });
  return out;
}

}  // namespace horizon::kitti
