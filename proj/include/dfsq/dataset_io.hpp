#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfsq/angular_fit.hpp"
#include "dfsq/damped_sinusoid_fit.hpp"
#include "dfsq/linear_fit.hpp"
#include "dfsq/moment.hpp"
#include "dfsq/ramsey_sim.hpp"

namespace dfsq {

class DatasetFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

// Parity datasets: header "tau_s,parity,sigma,shots", one record per line.
std::string format_dataset_csv(const ParityDataset& data);
ParityDataset parse_dataset_csv(const std::string& text);
ParityDataset read_dataset_csv(const std::filesystem::path& path);

// Scan tables: three numeric columns with caller-chosen header names.
std::string format_scan_csv(std::span<const ScanPoint> points, const std::string& x_name,
                            const std::string& y_name, const std::string& sigma_name);
std::vector<ScanPoint> parse_scan_csv(const std::string& text);
std::vector<ScanPoint> read_scan_csv(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const SimulationSnapshot& snapshot);
nlohmann::ordered_json to_json(const DampedSinusoidFit& fit);
nlohmann::ordered_json to_json(const LinearFit& fit);
nlohmann::ordered_json to_json(const PowerLawFit& fit);
nlohmann::ordered_json to_json(const AngularFit& fit);
nlohmann::ordered_json to_json(const MomentResult& moment);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dfsq
