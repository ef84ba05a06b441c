#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxocc/mdp.hpp"

namespace maxocc {

/// Header of an exported value function. Epsilon is present only for values
/// solved under the greedy-with-exploration objective.
struct ValueFileMeta {
    double gamma = 0.0;
    double alpha = 1.0;
    double beta = 0.0;
    std::optional<double> epsilon;
};

/// JSON document {"gamma","alpha","beta",["epsilon",]"n_states","values"},
/// numbers with 17 significant digits.
std::string value_json_string(const ValueFileMeta& meta, std::span<const double> values);
void save_value_json(const std::string& path, const ValueFileMeta& meta,
                     std::span<const double> values);
std::pair<ValueFileMeta, std::vector<double>> load_value_json(const std::string& path);

/// Raw format: magic "HVAL", 4-byte little-endian version 1, 8-byte
/// little-endian state count, then count little-endian IEEE-754 doubles.
std::string value_hval_bytes(std::span<const double> values);
void save_value_hval(const std::string& path, std::span<const double> values);
std::vector<double> load_value_hval(const std::string& path);

/// Plain-text 16-bit PGM (P2), row-major, with counts scaled onto
/// [0, 65535]; a sidecar JSON at path + ".json" records the normalization.
std::string pgm16_string(std::span<const std::uint64_t> counts, std::size_t width,
                         std::size_t height);
void save_pgm16(const std::string& path, std::span<const std::uint64_t> counts, std::size_t width,
                std::size_t height);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace maxocc
