#include "attnpca/datamodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "attnpca/error.hpp"

namespace attnpca {

char to_code(std::optional<Gender> g) {
    if (!g) return '-';
    return *g == Gender::male ? 'm' : 'f';
}

char to_code(std::optional<Expression> e) {
    if (!e) return '-';
    return *e == Expression::smiling ? 's' : 'n';
}

std::optional<Gender> parse_gender(std::string_view code) {
    if (code == "m") return Gender::male;
    if (code == "f") return Gender::female;
    if (code == "-" || code.empty()) return std::nullopt;
    throw DataError("invalid gender label '" + std::string(code) + "'");
}

std::optional<Expression> parse_expression(std::string_view code) {
    if (code == "s") return Expression::smiling;
    if (code == "n") return Expression::neutral;
    if (code == "-" || code.empty()) return std::nullopt;
    throw DataError("invalid expression label '" + std::string(code) + "'");
}

ImageVector flatten(const Raster& raster) {
    ImageVector v(static_cast<Eigen::Index>(raster.pixels.size()));
    for (std::size_t i = 0; i < raster.pixels.size(); ++i) v[static_cast<Eigen::Index>(i)] = raster.pixels[i];
    return v;
}

Raster unflatten(const ImageVector& values, ImageGeometry geometry) {
    if (static_cast<std::size_t>(values.size()) != geometry.size())
        throw UsageError("vector length does not match image geometry");
    std::vector<std::uint8_t> px(geometry.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
        const double v = std::clamp(std::round(values[static_cast<Eigen::Index>(i)]), 0.0, 255.0);
        px[i] = static_cast<std::uint8_t>(v);
    }
    return Raster(geometry, std::move(px));
}

DataMatrix::DataMatrix(Eigen::MatrixXd rows, std::vector<LabelRecord> labels, ImageGeometry geometry)
    : rows_(std::move(rows)), labels_(std::move(labels)), geometry_(geometry) {
    if (rows_.rows() < 2) throw DataError("a data matrix needs at least 2 samples");
    if (static_cast<std::size_t>(rows_.cols()) != geometry_.size())
        throw DataError("row length does not match image geometry");
    if (labels_.empty()) labels_.resize(static_cast<std::size_t>(rows_.rows()));
    if (labels_.size() != static_cast<std::size_t>(rows_.rows()))
        throw DataError("label count does not match sample count");
    grand_mean_ = rows_.colwise().mean().transpose();
}

DataMatrix DataMatrix::subset(std::span<const std::size_t> indices) const {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(indices.size()), rows_.cols());
    std::vector<LabelRecord> labels;
    labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= static_cast<std::size_t>(rows_.rows())) throw UsageError("subset index out of range");
        sub.row(static_cast<Eigen::Index>(i)) = rows_.row(static_cast<Eigen::Index>(indices[i]));
        labels.push_back(labels_[indices[i]]);
    }
    return DataMatrix(std::move(sub), std::move(labels), geometry_);
}

Eigen::MatrixXd center(const DataMatrix& data) {
    return data.rows().rowwise() - data.grand_mean().transpose();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

constexpr std::string_view kManifestHeader = "path,subject_id,gender,expression";

} // namespace

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest " + path.string());

    DatasetManifest manifest;
    manifest.base_dir = path.parent_path();
    bool header_seen = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto fields = split_csv(line);
            if (fields.size() == 3 && trim(fields[0]) == "#geometry") {
                try {
                    manifest.geometry = ImageGeometry{std::stoi(fields[1]), std::stoi(fields[2])};
                } catch (const std::exception&) {
                    throw DataError("bad geometry directive in " + path.string());
                }
                if (manifest.geometry->rows < 1 || manifest.geometry->cols < 1)
                    throw DataError("bad geometry directive in " + path.string());
            }
            continue;
        }
        if (!header_seen) {
            if (line != kManifestHeader)
                throw DataError("manifest header must be '" + std::string(kManifestHeader) + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 4)
            throw DataError("manifest line " + std::to_string(line_no) + ": expected 4 fields");
        ManifestEntry e;
        e.path = trim(fields[0]);
        e.subject_id = trim(fields[1]);
        if (e.path.empty()) throw DataError("manifest line " + std::to_string(line_no) + ": empty path");
        e.gender = parse_gender(trim(fields[2]));
        e.expression = parse_expression(trim(fields[3]));
        manifest.entries.push_back(std::move(e));
    }
    if (!header_seen) throw DataError("manifest " + path.string() + " has no header");
    return manifest;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest " + path.string());
    if (manifest.geometry)
        out << "#geometry," << manifest.geometry->rows << ',' << manifest.geometry->cols << '\n';
    out << kManifestHeader << '\n';
    for (const auto& e : manifest.entries)
        out << e.path << ',' << e.subject_id << ',' << to_code(e.gender) << ',' << to_code(e.expression) << '\n';
}

std::vector<FaceImage> load_images(const DatasetManifest& manifest) {
    std::set<std::string> ids;
    std::vector<FaceImage> images;
    images.reserve(manifest.entries.size());
    std::optional<ImageGeometry> geometry = manifest.geometry;
    for (const auto& e : manifest.entries) {
        if (!ids.insert(e.path).second) throw DataError("duplicate image id " + e.path);
        std::filesystem::path p(e.path);
        if (p.is_relative()) p = manifest.base_dir / p;
        if (!std::filesystem::exists(p)) throw DataError("missing image file " + p.string());
        Raster raster = read_pgm(p);
        if (!geometry) geometry = raster.geometry;
        if (raster.geometry != *geometry)
            throw DataError("image " + e.path + " is " + std::to_string(raster.rows()) + "x" +
                            std::to_string(raster.cols()) + ", expected " + std::to_string(geometry->rows) + "x" +
                            std::to_string(geometry->cols));
        images.push_back(FaceImage{LabelRecord{e.path, e.subject_id, e.gender, e.expression}, std::move(raster)});
    }
    return images;
}

DataMatrix to_data_matrix(std::span<const FaceImage> images) {
    if (images.empty()) throw DataError("no images");
    const ImageGeometry g = images.front().raster.geometry;
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(g.size()));
    std::vector<LabelRecord> labels;
    labels.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].raster.geometry != g) throw DataError("images do not share one geometry");
        rows.row(static_cast<Eigen::Index>(i)) = flatten(images[i].raster).transpose();
        labels.push_back(images[i].label);
    }
    return DataMatrix(std::move(rows), std::move(labels), g);
}

DataMatrix load_dataset(const DatasetManifest& manifest) {
    const auto images = load_images(manifest);
    return to_data_matrix(images);
}

} // namespace attnpca
