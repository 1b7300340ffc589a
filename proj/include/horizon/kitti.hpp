#ifndef HORIZON_KITTI_HPP
#define HORIZON_KITTI_HPP

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "horizon/geometry.hpp"

namespace horizon::kitti {

// One OXTS line; roll/pitch/yaw are fields 3..5, everything else is kept
// verbatim but unused.
struct OxtsRecord {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  std::vector<double> raw;
};

// Rotation chain and per-camera intrinsics of one recording day.
// K_N is the left 3x3 block of P_rect_N; dims come from S_rect_N.
struct CalibChain {
  geom::Rotation r_imu_to_velo;
  geom::Rotation r_velo_to_cam;
  geom::Rotation r_rect;
  std::array<Mat3, 4> k{};
  std::array<geom::ImageDims, 4> dims{};
};

struct AnnotatedFrame {
  int frame_index = 0;
  geom::HorizonParams params;
  geom::HomLine line;
};

struct SequenceAnnotation {
  std::string sequence_id;
  int camera_index = 0;
  std::vector<AnnotatedFrame> frames;
};

struct AnnotateResult {
  SequenceAnnotation annotation;
  int skipped = 0;
};

enum class Split { train, val, test };

struct RangeOverride {
  Split split = Split::train;
  int first = 0;
  int last = 0;  // inclusive
};

struct SequenceSplit {
  Split split = Split::train;
  std::vector<RangeOverride> ranges;
};

struct SplitSpec {
  std::map<std::string, SequenceSplit> assignment;
};

struct Partitions {
  std::vector<SequenceAnnotation> train, val, test;
};

// R = Rz(yaw) * Ry(pitch) * Rx(roll), the KITTI devkit convention.
geom::Rotation rotation_from_rpy(double roll, double pitch, double yaw);

// R_rect * R_velo_to_cam * R_imu_to_velo. Factors must be orthonormal within
// 1e-6 (BadCalibration otherwise); the product is re-orthonormalized so the
// stricter geometry invariants hold downstream.
geom::Rotation imu_to_cam_rotation(const CalibChain& calib, int camera);

// Horizon of one frame: line proportional to K^{-T} R_{IMU->cam} R_IMU [0,1,0].
std::pair<geom::HomLine, geom::HorizonParams> annotate_frame(
    const geom::CameraModel& cam, const geom::Rotation& r_imu_to_cam,
    const geom::Rotation& r_imu, const geom::ImageDims& dims);

// One annotation per record, in order; frames with invalid records or
// degenerate projections are skipped and counted.
AnnotateResult annotate_sequence(const std::vector<OxtsRecord>& oxts,
                                 const CalibChain& calib, int camera,
                                 const geom::ImageDims& dims,
                                 const std::string& sequence_id);

// Disjoint train/val/test partitions; range overrides split a sequence by
// frame index. Sequences missing from the spec throw UnknownSequence.
Partitions apply_split(const std::vector<SequenceAnnotation>& annotations,
                       const SplitSpec& spec);

Split split_from_string(const std::string& name);
std::string to_string(Split split);

// ---- parsing ----

// One whitespace-separated record per line.
std::vector<OxtsRecord> parse_oxts(std::istream& in);

// Either a single multi-line text file, or the KITTI raw per-frame layout
// (a directory whose data/ folder holds one numbered file per frame).
std::vector<OxtsRecord> load_oxts(const std::filesystem::path& path);

// Reads calib_imu_to_velo.txt, calib_velo_to_cam.txt and calib_cam_to_cam.txt
// from one directory.
CalibChain load_calib(const std::filesystem::path& calib_dir);

struct SequenceLocation {
  std::string sequence_id;
  std::filesystem::path oxts;       // dir or file passed to load_oxts
  std::filesystem::path calib_dir;  // recording-day directory
};

// Scans a KITTI raw root: <root>/<date>/<date>_drive_XXXX_sync/oxts, with the
// calibration files in <root>/<date>/. Sorted by sequence id.
std::vector<SequenceLocation> discover_sequences(
    const std::filesystem::path& root);

}  // namespace horizon::kitti

#endif
