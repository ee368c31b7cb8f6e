#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace selfdual::cli {

enum class OutputFormat { Json, Csv, Table };

struct RunConfig {
  double precision_eps = 1e-12;  // must lie in (1e-15, 1e-2)
  std::vector<std::string> catalog_paths;
  OutputFormat output_format = OutputFormat::Json;
  std::uint64_t seed = 0;
};

// "a+bi", "a-bi", "bi", "i", "-i", "a". Throws std::invalid_argument.
std::complex<double> parse_complex(std::string_view text);

// Shortest representation that round-trips.
std::string format_double(double v);

// Runs one command line (args excludes the program name).
// Returns 0 on success, 1 on a computation error, 2 on a usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selfdual::cli
