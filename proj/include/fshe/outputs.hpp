// Deterministic text output: shortest round-trip double formatting so that
// identical runs produce byte-identical files.
#pragma once

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fshe::outputs {

inline std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(long v) { return std::to_string(v); }
inline std::string fmt(unsigned long long v) { return std::to_string(v); }

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        out_ << header << "\n";
    }
    template <typename... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, out_ << cell_(cells)), ...);
        out_ << "\n";
    }

  private:
    static std::string cell_(const std::string& s) { return s; }
    static std::string cell_(const char* s) { return s; }
    static std::string cell_(double v) { return fmt(v); }
    static std::string cell_(int v) { return fmt(v); }
    static std::string cell_(long v) { return fmt(v); }
    static std::string cell_(unsigned long long v) { return fmt(v); }
    std::ofstream out_;
};

}  // namespace fshe::outputs
