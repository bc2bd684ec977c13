#ifndef ABCBP_CLI_HPP
#define ABCBP_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace abcbp::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_data = 2;
inline constexpr int exit_numeric = 3;

// Whole command-line program. args[0] is the program name.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace abcbp::cli

#endif
