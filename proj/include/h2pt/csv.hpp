#pragma once

// Minimal deterministic CSV writer: comma separator, '.' decimal point,
// header row, LF line endings, doubles serialized with shortest round-trip
// formatting so identical runs produce byte-identical files.

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "h2pt/errors.hpp"
#include "h2pt/format.hpp"

namespace h2pt {

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path,
                       std::vector<std::string> header)
        : out_(path, std::ios::binary), n_cols_(header.size()) {
        if (!out_) {
            throw Error(ErrorKind::config, "cannot open output file: " + path);
        }
        write_row_(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != n_cols_) {
            throw Error(ErrorKind::invariant,
                        "CSV row width does not match header");
        }
        write_row_(cells);
    }

    void row(std::initializer_list<double> values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_double(v));
        row(cells);
    }

private:
    void write_row_(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::size_t n_cols_;
};

} // namespace h2pt
