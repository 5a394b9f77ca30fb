#pragma once
// Deterministic RNG, hashing, and small string/CSV helpers shared by all modules.
//
// All randomness in the toolkit goes through DetRng, which exposes raw
// mt19937_64 output through fixed bit-twiddling conversions. The standard
// engine is bit-exact across platforms; the standard distributions are not,
// so we never use them.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relink {

// 64-bit FNV-1a. Used for input-file hashes in run manifests and for
// deriving per-document / per-persona seeds.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64_mix(std::uint64_t a, std::uint64_t b) {
    char buf[16];
    for (int i = 0; i < 8; ++i) buf[i] = char(a >> (8 * i));
    for (int i = 0; i < 8; ++i) buf[8 + i] = char(b >> (8 * i));
    return fnv1a64(std::string_view(buf, 16));
}

// Deterministic random stream. Conversions use only raw engine output.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound) via 128-bit multiply (no modulo bias loop; the
    // tiny residual bias is irrelevant here and the mapping is portable).
    std::uint64_t next_below(std::uint64_t bound) {
        return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Uniform double in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller on two fixed uniforms.
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = std::size_t(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// ---- string helpers ----

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
    return out;
}

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Lowercase, trim, collapse internal whitespace runs to a single space.
std::string normalize_key(std::string_view s);

// Splits on whitespace after normalize_key; empty input gives empty vector.
std::vector<std::string> split_ws(std::string_view s);

// ---- CSV ----

// Minimal CSV: handles quoted fields with embedded commas and doubled quotes.
std::vector<std::string> parse_csv_line(std::string_view line);
std::string csv_quote(std::string_view field);

// ---- files ----

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, std::string_view content);
std::vector<std::string> read_lines(const std::filesystem::path& p);

// Shortest round-trip decimal rendering of a double (same renderer the JSON
// outputs use, so CSV and JSON agree byte-for-byte across reruns).
std::string fmt_double(double x);

// Raised for malformed or inconsistent input data; the CLI maps it to exit 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace relink
