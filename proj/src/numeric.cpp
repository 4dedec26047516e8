#include "searchbias/numeric.hpp"

#include <charconv>

namespace searchbias {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace searchbias
