#include "msb/format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace msb {

std::string format_double(double v) {
    if (std::isnan(v)) throw std::invalid_argument("format_double: NaN value");
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

}  // namespace msb
