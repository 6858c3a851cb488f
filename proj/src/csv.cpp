#include "superosc/csv.hpp"

#include <cmath>
#include <iostream>

#include <fmt/format.h>

#include "superosc/errors.hpp"

namespace superosc {

std::string format_number(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    return fmt::format("{:.17g}", v);
}

CsvWriter::CsvWriter(const std::string& path, std::initializer_list<std::string_view> names) : path_(path) {
    if (path == "-") {
        out_ = &std::cout;
    } else {
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*file_) throw IoError(fmt::format("cannot open '{}' for writing", path));
        out_ = file_.get();
    }
    if (names.size() > 0) header(names);
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
    for (auto n : names) field(n);
    end_row();
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (const auto& n : names) field(std::string_view(n));
    end_row();
}

CsvWriter& CsvWriter::field(std::string_view text) {
    if (!first_) *out_ << ',';
    *out_ << text;
    first_ = false;
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_number(v))); }

CsvWriter& CsvWriter::field(long long v) { return field(std::string_view(fmt::format("{}", v))); }

void CsvWriter::end_row() {
    *out_ << '\n';
    first_ = true;
}

void CsvWriter::flush() {
    out_->flush();
    if (file_ && !*file_) throw IoError(fmt::format("write to '{}' failed", path_));
}

}  // namespace superosc
