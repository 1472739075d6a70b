#include "sgrid/matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgrid {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows)
{
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw std::invalid_argument("Matrix::from_rows: ragged rows");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const
{
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r] = (*this)(r, c);
    return out;
}

std::vector<std::vector<double>> Matrix::to_rows() const
{
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r].assign(row(r).begin(), row(r).end());
    return out;
}

} // namespace sgrid
