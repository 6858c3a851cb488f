#pragma once

#include <fstream>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace superosc {

/// 17 significant digits, round-trippable; NaN prints as NA.
std::string format_number(double v);

/// Comma-separated writer with a fixed header. Writes to a file, or to
/// stdout when the path is "-".
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::initializer_list<std::string_view> header);
    explicit CsvWriter(std::ostream& out) : out_(&out) {}

    void header(std::initializer_list<std::string_view> names);
    void header(const std::vector<std::string>& names);

    CsvWriter& field(std::string_view text);
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    void end_row();

    void flush();
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_ = nullptr;
    bool first_ = true;
};

}  // namespace superosc
