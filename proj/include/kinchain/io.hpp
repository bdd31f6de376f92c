#pragma once

#include "kinchain/field.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace kinchain {

// Grid dump format: one JSON header line (index set, axis specs, time,
// payload byte count), then the raw tensor as little-endian IEEE-754
// doubles, row-major, axes by ascending kinematic order, components
// innermost.  Round trips are bit-exact.
void write_grid_dump(const DistributionField& f, const std::filesystem::path& path);
DistributionField read_grid_dump(const std::filesystem::path& path);

// Minimal deterministic CSV writer: fixed column set, shortest round-trip
// double formatting.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);
    void row_named(const std::string& label, const std::vector<double>& values);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string format_double(double v);

} // namespace kinchain
