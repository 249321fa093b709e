// Copyright 2026 The sdbmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sdbmc/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace fs = std::filesystem;

namespace sdbmc {

namespace {

struct PatternParts {
    std::string prefix;
    std::string conversion;
    std::string suffix;
};

PatternParts split_pattern(const std::string& pattern) {
    static const std::regex conv(R"(%0?[0-9]*d)");
    std::smatch m;
    if (!std::regex_search(pattern, m, conv))
        throw Error(ErrorCode::InvalidConfig, "file pattern '" + pattern + "' has no integer conversion");
    PatternParts parts{m.prefix().str(), m.str(), m.suffix().str()};
    if (parts.prefix.find('%') != std::string::npos || parts.suffix.find('%') != std::string::npos)
        throw Error(ErrorCode::InvalidConfig, "file pattern '" + pattern + "' must hold exactly one conversion");
    return parts;
}

std::string regex_escape(const std::string& s) {
    static const std::regex special(R"([.^$|()\[\]{}*+?\\])");
    return std::regex_replace(s, special, R"(\$&)");
}

cv::Mat imread_checked(const fs::path& path) {
    if (!fs::exists(path)) throw Error(ErrorCode::UnreadableFile, "no such file: " + path.string());
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (img.empty()) throw Error(ErrorCode::UnreadableFile, "cannot decode image: " + path.string());
    return img;
}

void imwrite_checked(const fs::path& path, const cv::Mat& img) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), img);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

Frame gray_from_mat(const cv::Mat& img, const fs::path& path) {
    if (img.depth() != CV_8U || img.channels() != 1)
        throw Error(ErrorCode::UnreadableFile, "expected an 8-bit single-channel image: " + path.string());
    Frame out(img.cols, img.rows, 1);
    for (int y = 0; y < img.rows; ++y) {
        const auto* row = img.ptr<std::uint8_t>(y);
        std::copy(row, row + img.cols, &out.at(0, y));
    }
    return out;
}

}  // namespace

std::string format_index(const std::string& pattern, int index) {
    const PatternParts parts = split_pattern(pattern);
    char buf[64];
    std::snprintf(buf, sizeof(buf), parts.conversion.c_str(), index);
    return parts.prefix + buf + parts.suffix;
}

std::vector<int> matching_indices(const fs::path& directory, const std::string& pattern) {
    if (!fs::is_directory(directory))
        throw Error(ErrorCode::UnreadableFile, "not a directory: " + directory.string());
    const PatternParts parts = split_pattern(pattern);
    const std::regex re("^" + regex_escape(parts.prefix) + "([0-9]+)" + regex_escape(parts.suffix) + "$");
    std::vector<int> indices;
    for (const auto& entry : fs::directory_iterator(directory)) {
        const std::string name = entry.path().filename().string();
        std::smatch m;
        if (!std::regex_match(name, m, re)) continue;
        const int idx = std::stoi(m[1].str());
        if (format_index(pattern, idx) == name) indices.push_back(idx);
    }
    std::sort(indices.begin(), indices.end());
    return indices;
}

Frame read_frame(const fs::path& path) {
    cv::Mat img = imread_checked(path);
    if (img.depth() != CV_8U) {
        cv::Mat tmp;
        img.convertTo(tmp, CV_8U, img.depth() == CV_16U ? 1.0 / 257.0 : 1.0);
        img = tmp;
    }
    if (img.channels() == 1) return gray_from_mat(img, path);
    if (img.channels() != 3 && img.channels() != 4)
        throw Error(ErrorCode::UnreadableFile, "unsupported channel count in " + path.string());

    // OpenCV decodes to BGR(A); frames are stored RGB.
    Frame out(img.cols, img.rows, 3);
    const int cn = img.channels();
    for (int y = 0; y < img.rows; ++y) {
        const auto* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.cols; ++x) {
            out.at(x, y, 0) = row[x * cn + 2];
            out.at(x, y, 1) = row[x * cn + 1];
            out.at(x, y, 2) = row[x * cn + 0];
        }
    }
    return out;
}

void write_frame(const fs::path& path, const Frame& frame) {
    if (frame.channels() != 1 && frame.channels() != 3)
        throw Error(ErrorCode::WrongChannelCount, "only gray or RGB frames can be written");
    cv::Mat img(frame.height(), frame.width(), frame.channels() == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < frame.height(); ++y) {
        auto* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < frame.width(); ++x) {
            if (frame.channels() == 1) {
                row[x] = frame.at(x, y);
            } else {
                row[3 * x + 0] = frame.at(x, y, 2);
                row[3 * x + 1] = frame.at(x, y, 1);
                row[3 * x + 2] = frame.at(x, y, 0);
            }
        }
    }
    imwrite_checked(path, img);
}

Frame read_labels(const fs::path& path) {
    cv::Mat img = imread_checked(path);
    if (img.channels() == 3 || img.channels() == 4) {
        // Some ground-truth sets ship gray labels in RGB files; take one channel.
        std::vector<cv::Mat> planes;
        cv::split(img, planes);
        img = planes[0];
    }
    return gray_from_mat(img, path);
}

MaskFrame read_mask(const fs::path& path) {
    Frame labels = read_labels(path);
    std::vector<std::uint8_t> data(labels.data().begin(), labels.data().end());
    try {
        return MaskFrame(labels.width(), labels.height(), std::move(data));
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

void write_mask(const fs::path& path, const MaskFrame& mask) {
    cv::Mat img(mask.height(), mask.width(), CV_8UC1);
    const auto labels = mask.labels();
    for (int y = 0; y < mask.height(); ++y)
        std::copy_n(labels.data() + static_cast<std::size_t>(y) * mask.width(), mask.width(), img.ptr<std::uint8_t>(y));
    imwrite_checked(path, img);
}

std::vector<MaskFrame> load_masks(const fs::path& directory, const std::string& pattern, IndexRange range) {
    std::vector<MaskFrame> masks;
    masks.reserve(range.count());
    for (int i = range.first; i <= range.last; ++i) {
        const fs::path p = directory / format_index(pattern, i);
        if (!fs::exists(p)) throw Error(ErrorCode::MissingFrame, "missing mask " + p.string());
        masks.push_back(read_mask(p));
    }
    return masks;
}

void write_probability_png(const fs::path& path, const FloatImage& probability) {
    if (probability.channels() != 1) throw Error(ErrorCode::WrongChannelCount, "probability map must have 1 channel");
    cv::Mat img(probability.height(), probability.width(), CV_16UC1);
    for (int y = 0; y < probability.height(); ++y) {
        auto* row = img.ptr<std::uint16_t>(y);
        for (int x = 0; x < probability.width(); ++x) {
            const double p = std::clamp(static_cast<double>(probability.at(x, y)), 0.0, 1.0);
            row[x] = static_cast<std::uint16_t>(std::floor(p * 65535.0 + 0.5));
        }
    }
    imwrite_checked(path, img);
}

FloatImage read_probability_png(const fs::path& path) {
    cv::Mat img = imread_checked(path);
    if (img.depth() != CV_16U || img.channels() != 1)
        throw Error(ErrorCode::UnreadableFile, "expected a 16-bit single-channel PNG: " + path.string());
    FloatImage out(img.cols, img.rows, 1);
    for (int y = 0; y < img.rows; ++y) {
        const auto* row = img.ptr<std::uint16_t>(y);
        for (int x = 0; x < img.cols; ++x) out.at(x, y) = static_cast<float>(row[x] / 65535.0);
    }
    return out;
}

FrameSequence load_sequence(const fs::path& directory, const std::string& pattern, std::optional<IndexRange> range) {
    if (!fs::is_directory(directory))
        throw Error(ErrorCode::UnreadableFile, "input directory does not exist: " + directory.string());

    std::vector<int> indices;
    if (range) {
        if (range->last < range->first) throw Error(ErrorCode::Precondition, "empty frame range");
        for (int i = range->first; i <= range->last; ++i) {
            if (!fs::exists(directory / format_index(pattern, i)))
                throw Error(ErrorCode::MissingFrame, "frame " + std::to_string(i) + " missing from " + directory.string());
            indices.push_back(i);
        }
    } else {
        indices = matching_indices(directory, pattern);
        if (indices.empty())
            throw Error(ErrorCode::UnreadableFile, "no files match '" + pattern + "' in " + directory.string());
        for (std::size_t i = 1; i < indices.size(); ++i) {
            if (indices[i] != indices[i - 1] + 1)
                throw Error(ErrorCode::MissingFrame, "gap after frame " + std::to_string(indices[i - 1]));
        }
    }

    FrameSequence seq;
    seq.source_id = directory.string();
    seq.first_index = indices.front();
    seq.frames.reserve(indices.size());
    for (int idx : indices) seq.frames.push_back(read_frame(directory / format_index(pattern, idx)));
    seq.validate();
    return seq;
}

}  // namespace sdbmc
