#ifndef PINN_IO_HPP_
#define PINN_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace pinn {

// Writes to a sibling temporary file and renames it over the target, so a
// reader never sees a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// "%.4e", the number layout of the error tables (7.4050e-03).
std::string format_sci4(double v);
// Shortest representation that round-trips to the same double.
std::string format_roundtrip(double v);

}  // namespace pinn

#endif  // PINN_IO_HPP_
