#ifndef HORIZON_IO_HPP
#define HORIZON_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "horizon/kitti.hpp"
#include "horizon/metrics.hpp"
#include "horizon/tape.hpp"

namespace horizon::io {

// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);

// Annotation CSV: header "frame_index,omega_px,theta_rad,l0,l1,l2", one row
// per frame, LF line endings, shortest round-trip decimals, canonical-sign
// homogeneous coefficients.
void write_annotation_csv(const kitti::SequenceAnnotation& annotation,
                          const std::filesystem::path& path);
kitti::SequenceAnnotation read_annotation_csv(
    const std::filesystem::path& path);

kitti::SplitSpec load_split_spec(const std::filesystem::path& path);
void save_split_spec(const kitti::SplitSpec& spec,
                     const std::filesystem::path& path);

// Checkpoint: versioned JSON map name -> {shape, data}.
void save_checkpoint(const nn::ParamStore& params,
                     const std::filesystem::path& path);
void load_checkpoint(nn::ParamStore& params,
                     const std::filesystem::path& path);

void save_metrics_report(const metrics::MetricsReport& report,
                         const std::filesystem::path& path);

// Two-column CSV "error,cdf".
void write_histogram_csv(
    const std::vector<std::pair<double, double>>& histogram,
    const std::filesystem::path& path);

}  // namespace horizon::io

#endif
