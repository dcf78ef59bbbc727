// Shared helpers for the unit tests.
#pragma once

#include <gtest/gtest.h>

#include <functional>

#include "qsl/errors.hpp"
#include "qsl/linalg.hpp"

#define EXPECT_QSL_ERROR(stmt, expected_kind)                                  \
    do {                                                                       \
        try {                                                                  \
            stmt;                                                              \
            ADD_FAILURE() << "expected " << qsl::to_string(expected_kind);     \
        } catch (const qsl::Error& e) {                                        \
            EXPECT_EQ(e.kind(), expected_kind) << e.what();                    \
        }                                                                      \
    } while (0)

namespace qsl::testing {

inline Matrix diag(std::initializer_list<double> values) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) m(i, i) = v, ++i;
    return m;
}

inline Vector ket(std::initializer_list<cplx> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (cplx c : values) v(i++) = c;
    return v;
}

}  // namespace qsl::testing
