#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoslice {

using Vec3 = Eigen::Vector3d;

// Errors carry a human-readable message; the CLI maps them to exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thread cap from GEOSLICE_THREADS (>=1). Defaults to hardware concurrency.
int max_threads();

// Deterministic parallel loop: results must be written by index, never appended.
void parallel_for(int n, const std::function<void(int)>& body);

inline double deg2rad(double d) { return d * 3.14159265358979323846 / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / 3.14159265358979323846; }

} // namespace geoslice
