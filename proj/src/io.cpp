#include "rmlab/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rmlab/error.hpp"

namespace rmlab {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io-error", "cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() /
                         (target.filename().string() + ".tmp" +
                          std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io-error", "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("io-error", "short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

RealMatrix read_matrix_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    int line_no = 0;
    const auto fail = [&](const std::string& what) -> void {
        throw Error("parse-error",
                    path + ": line " + std::to_string(line_no) + ": " + what);
    };
    if (!std::getline(in, line)) {
        line_no = 1;
        fail("missing header row");
    }
    ++line_no;
    int rows = 0, cols = 0;
    if (std::sscanf(line.c_str(), "%d,%d", &rows, &cols) != 2 || rows < 1 || cols < 1)
        fail("header must be 'rows,cols'");
    RealMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) {
            ++line_no;
            fail("expected " + std::to_string(rows) + " data rows");
        }
        ++line_no;
        std::istringstream fields(line);
        std::string field;
        for (int j = 0; j < cols; ++j) {
            if (!std::getline(fields, field, ','))
                fail("expected " + std::to_string(cols) + " values");
            try {
                std::size_t used = 0;
                m(i, j) = std::stod(field, &used);
            } catch (const std::exception&) {
                fail("bad number '" + field + "'");
            }
        }
        if (std::getline(fields, field, ',')) fail("too many values");
    }
    return m;
}

std::string matrix_to_csv(const RealMatrix& m) {
    std::ostringstream out;
    out << m.rows() << "," << m.cols() << "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace rmlab
