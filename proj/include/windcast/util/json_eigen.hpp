#pragma once

#include <Eigen/Core>
#include <json.hpp>

namespace windcast::util {

inline nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& e : j) v(i++) = e.get<double>();
    return v;
}

// Matrices are serialized row-major as a flat array plus dimensions.
inline nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
    }
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(a)}};
}

inline Eigen::MatrixXd mat_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    Eigen::MatrixXd m(rows, cols);
    const auto& data = j.at("data");
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data.at(k++).get<double>();
    }
    return m;
}

}  // namespace windcast::util
