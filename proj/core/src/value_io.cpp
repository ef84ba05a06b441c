#include "maxocc/value_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace maxocc {

namespace {
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}
std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}
}  // namespace

std::string value_json_string(const ValueFileMeta& meta, std::span<const double> values) {
    std::ostringstream out;
    out << "{\"gamma\":" << fmt17(meta.gamma) << ",\"alpha\":" << fmt17(meta.alpha)
        << ",\"beta\":" << fmt17(meta.beta);
    if (meta.epsilon) out << ",\"epsilon\":" << fmt17(*meta.epsilon);
    out << ",\"n_states\":" << values.size() << ",\"values\":[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ",";
        out << fmt17(values[i]);
    }
    out << "]}";
    return out.str();
}

void save_value_json(const std::string& path, const ValueFileMeta& meta,
                     std::span<const double> values) {
    write_text_file(path, value_json_string(meta, values));
}

std::pair<ValueFileMeta, std::vector<double>> load_value_json(const std::string& path) {
    const auto j = nlohmann::json::parse(read_text_file(path));
    ValueFileMeta meta;
    meta.gamma = j.at("gamma").get<double>();
    meta.alpha = j.at("alpha").get<double>();
    meta.beta = j.at("beta").get<double>();
    if (j.contains("epsilon")) meta.epsilon = j.at("epsilon").get<double>();
    std::vector<double> values = j.at("values").get<std::vector<double>>();
    if (j.at("n_states").get<std::size_t>() != values.size())
        throw DomainError("value file n_states does not match the values array");
    return {meta, std::move(values)};
}

std::string value_hval_bytes(std::span<const double> values) {
    std::string out;
    out.reserve(16 + values.size() * 8);
    out += "HVAL";
    put_u32_le(out, 1);
    put_u64_le(out, values.size());
    for (const double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_u64_le(out, bits);
    }
    return out;
}

void save_value_hval(const std::string& path, std::span<const double> values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write " + path);
    const std::string bytes = value_hval_bytes(values);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<double> load_value_hval(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 16 || bytes.compare(0, 4, "HVAL") != 0)
        throw DomainError(path + " is not a value file");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (get_u32_le(p + 4) != 1) throw DomainError("unsupported value file version");
    const std::uint64_t count = get_u64_le(p + 8);
    if (bytes.size() != 16 + count * 8) throw DomainError("value file is truncated");
    std::vector<double> values(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t bits = get_u64_le(p + 16 + i * 8);
        std::memcpy(&values[i], &bits, 8);
    }
    return values;
}

std::string pgm16_string(std::span<const std::uint64_t> counts, std::size_t width,
                         std::size_t height) {
    if (counts.size() != width * height) throw DomainError("histogram shape mismatch");
    const std::uint64_t peak = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    std::ostringstream out;
    out << "P2\n" << width << " " << height << "\n65535\n";
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c) out << " ";
            const std::uint64_t v = counts[r * width + c];
            out << (peak == 0 ? 0 : static_cast<std::uint64_t>((v * 65535 + peak / 2) / peak));
        }
        out << "\n";
    }
    return out.str();
}

void save_pgm16(const std::string& path, std::span<const std::uint64_t> counts, std::size_t width,
                std::size_t height) {
    write_text_file(path, pgm16_string(counts, width, height));
    const std::uint64_t peak = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    std::uint64_t total = 0;
    for (const auto v : counts) total += v;
    std::ostringstream side;
    side << "{\"width\":" << width << ",\"height\":" << height << ",\"max_count\":" << peak
         << ",\"total_count\":" << total << ",\"maxval\":65535}";
    write_text_file(path + ".json", side.str());
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write " + path);
    out << content;
}

}  // namespace maxocc
