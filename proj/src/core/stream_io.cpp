#include "stream_io.hpp"

#include <cmath>
#include <json.hpp>

#include "errors.hpp"

namespace nsaqa {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_line(std::string_view line, size_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
        raise(ErrorKind::MalformedDocument,
              "line " + std::to_string(line_no) + ": invalid JSON");
    if (!j.is_object())
        raise(ErrorKind::MalformedDocument,
              "line " + std::to_string(line_no) + ": expected a JSON object");
    return j;
}

const json& require_field(const json& j, const char* field, const std::string& where) {
    auto it = j.find(field);
    if (it == j.end())
        raise(ErrorKind::SchemaViolation, where + ": missing field '" + field + "'");
    return *it;
}

double require_number(const json& j, const char* field, const std::string& where) {
    const json& v = require_field(j, field, where);
    if (!v.is_number())
        raise(ErrorKind::SchemaViolation, where + ": field '" + field + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        raise(ErrorKind::SchemaViolation, where + ": field '" + field + "' must be finite");
    return d;
}

std::string require_string(const json& j, const char* field, const std::string& where) {
    const json& v = require_field(j, field, where);
    if (!v.is_string())
        raise(ErrorKind::SchemaViolation, where + ": field '" + field + "' must be a string");
    return v.get<std::string>();
}

Pose parse_pose(const json& jp, const std::string& where) {
    if (!jp.is_object())
        raise(ErrorKind::SchemaViolation, where + ": pose must be an object or null");
    Pose pose;
    for (int i = 0; i < kJointCount; ++i) {
        const JointId id = static_cast<JointId>(i);
        const char* name = joint_name(id);
        auto it = jp.find(name);
        if (it == jp.end())
            raise(ErrorKind::SchemaViolation, where + ": pose missing joint '" + name + "'");
        const json& triple = *it;
        if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number() ||
            !triple[1].is_number() || !triple[2].is_number())
            raise(ErrorKind::SchemaViolation,
                  where + ": joint '" + name + "' must be [x, y, confidence]");
        Joint joint;
        joint.pt = {triple[0].get<double>(), triple[1].get<double>()};
        joint.confidence = triple[2].get<double>();
        if (!std::isfinite(joint.pt.x) || !std::isfinite(joint.pt.y) ||
            !std::isfinite(joint.confidence))
            raise(ErrorKind::InvariantViolation,
                  where + ": joint '" + name + "' has non-finite values");
        if (joint.confidence < 0.0 || joint.confidence > 1.0)
            raise(ErrorKind::InvariantViolation,
                  where + ": joint '" + name + "' confidence outside [0, 1]");
        pose[id] = joint;
    }
    if (jp.size() != static_cast<size_t>(kJointCount))
        raise(ErrorKind::SchemaViolation, where + ": pose must contain exactly the 16 joints");
    return pose;
}

SplashObservation parse_splash(const json& js, const std::string& where) {
    if (!js.is_object())
        raise(ErrorKind::SchemaViolation, where + ": splash must be an object or null");
    SplashObservation splash;
    splash.area = require_number(js, "area", where + " splash");
    if (splash.area < 0.0)
        raise(ErrorKind::InvariantViolation, where + ": splash area must be non-negative");
    const json& bbox = require_field(js, "bbox", where + " splash");
    if (!bbox.is_array() || bbox.size() != 4)
        raise(ErrorKind::SchemaViolation, where + ": splash bbox must be [x, y, w, h]");
    for (int i = 0; i < 4; ++i) {
        if (!bbox[i].is_number())
            raise(ErrorKind::SchemaViolation, where + ": splash bbox must be numeric");
        splash.bbox[static_cast<size_t>(i)] = bbox[i].get<double>();
        if (!std::isfinite(splash.bbox[static_cast<size_t>(i)]))
            raise(ErrorKind::InvariantViolation, where + ": splash bbox has non-finite values");
    }
    return splash;
}

ordered_json pose_to_json(const Pose& pose) {
    ordered_json jp = ordered_json::object();
    for (int i = 0; i < kJointCount; ++i) {
        const JointId id = static_cast<JointId>(i);
        const Joint& joint = pose[id];
        jp[joint_name(id)] = {joint.pt.x, joint.pt.y, joint.confidence};
    }
    return jp;
}

ordered_json splash_to_json(const SplashObservation& splash) {
    ordered_json js = ordered_json::object();
    js["area"] = splash.area;
    js["bbox"] = {splash.bbox[0], splash.bbox[1], splash.bbox[2], splash.bbox[3]};
    return js;
}

} // namespace

SymbolStream parse_stream(std::string_view bytes) {
    SymbolStream stream;
    size_t line_no = 0;
    size_t pos = 0;
    bool header_seen = false;

    while (pos <= bytes.size()) {
        size_t nl = bytes.find('\n', pos);
        std::string_view line =
            bytes.substr(pos, nl == std::string_view::npos ? bytes.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? bytes.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty()) continue;

        json j = parse_line(line, line_no);
        if (!header_seen) {
            const std::string where = "header";
            stream.clip_id = require_string(j, "clip_id", where);
            stream.fps = require_number(j, "fps", where);
            if (stream.fps <= 0.0)
                raise(ErrorKind::InvariantViolation, "header: fps must be positive");
            stream.frame_width = require_number(j, "frame_width", where);
            stream.frame_height = require_number(j, "frame_height", where);
            if (stream.frame_width <= 0.0 || stream.frame_height <= 0.0)
                raise(ErrorKind::InvariantViolation, "header: frame size must be positive");
            const json& jplat = require_field(j, "platform", where);
            if (!jplat.is_object())
                raise(ErrorKind::SchemaViolation, "header: field 'platform' must be an object");
            stream.platform.edge_point = {require_number(jplat, "edge_x", "platform"),
                                          require_number(jplat, "edge_y", "platform")};
            const std::string facing = require_string(jplat, "facing", "platform");
            if (facing == "left") stream.platform.facing = Facing::left;
            else if (facing == "right") stream.platform.facing = Facing::right;
            else raise(ErrorKind::SchemaViolation, "platform: facing must be 'left' or 'right'");
            stream.platform.water_y = require_number(jplat, "water_y", "platform");
            if (!(stream.platform.water_y > stream.platform.edge_point.y))
                raise(ErrorKind::InvariantViolation,
                      "platform: water_y must lie below edge_y (image coordinates)");
            header_seen = true;
            continue;
        }

        FrameSymbols frame;
        const std::string where = "frame record " + std::to_string(line_no);
        const double idx = require_number(j, "frame_index", where);
        frame.frame_index = static_cast<std::int64_t>(idx);
        if (static_cast<double>(frame.frame_index) != idx || frame.frame_index < 0)
            raise(ErrorKind::InvariantViolation,
                  where + ": frame_index must be a non-negative integer");
        const json& jpose = require_field(j, "pose", where);
        if (!jpose.is_null()) frame.pose = parse_pose(jpose, where);
        const json& jsplash = require_field(j, "splash", where);
        if (!jsplash.is_null()) frame.splash = parse_splash(jsplash, where);
        if (!stream.frames.empty() && frame.frame_index <= stream.frames.back().frame_index)
            raise(ErrorKind::InvariantViolation,
                  "frame_index " + std::to_string(frame.frame_index) +
                      " is not strictly increasing");
        stream.frames.push_back(std::move(frame));
    }

    if (!header_seen)
        raise(ErrorKind::SchemaViolation, "document: missing header record");
    if (stream.frames.size() < 2)
        raise(ErrorKind::InvariantViolation, "stream must contain at least 2 frames");

    bool any_pose = false;
    for (const auto& frame : stream.frames) {
        if (frame.pose) any_pose = true;
        if (frame.splash) {
            const auto& b = frame.splash->bbox;
            if (b[0] < 0.0 || b[1] < 0.0 || b[2] < 0.0 || b[3] < 0.0 ||
                b[0] + b[2] > stream.frame_width || b[1] + b[3] > stream.frame_height)
                raise(ErrorKind::InvariantViolation,
                      "frame " + std::to_string(frame.frame_index) +
                          ": splash bbox outside frame bounds");
        }
    }
    if (!any_pose)
        raise(ErrorKind::InvariantViolation, "stream must contain at least one pose");
    return stream;
}

std::string serialize_stream(const SymbolStream& s) {
    std::string out;
    ordered_json header = ordered_json::object();
    header["clip_id"] = s.clip_id;
    header["fps"] = s.fps;
    header["frame_width"] = s.frame_width;
    header["frame_height"] = s.frame_height;
    ordered_json jplat = ordered_json::object();
    jplat["edge_x"] = s.platform.edge_point.x;
    jplat["edge_y"] = s.platform.edge_point.y;
    jplat["facing"] = facing_name(s.platform.facing);
    jplat["water_y"] = s.platform.water_y;
    header["platform"] = std::move(jplat);
    out += header.dump();
    out += '\n';

    for (const auto& frame : s.frames) {
        ordered_json jf = ordered_json::object();
        jf["frame_index"] = frame.frame_index;
        jf["pose"] = frame.pose ? pose_to_json(*frame.pose) : ordered_json(nullptr);
        jf["splash"] = frame.splash ? splash_to_json(*frame.splash) : ordered_json(nullptr);
        out += jf.dump();
        out += '\n';
    }
    return out;
}

SymbolStream interpolate_poses(const SymbolStream& s, std::int64_t max_gap) {
    if (max_gap < 0)
        raise(ErrorKind::SchemaViolation, "interpolate_poses: max_gap must be non-negative");
    SymbolStream out = s;
    const size_t n = out.frames.size();

    size_t prev_pose = n; // index of the previous frame with a pose
    for (size_t i = 0; i < n; ++i) {
        if (!out.frames[i].pose) continue;
        if (prev_pose < n && i > prev_pose + 1) {
            const auto& a = out.frames[prev_pose];
            const auto& b = out.frames[i];
            const std::int64_t gap_len = b.frame_index - a.frame_index - 1;
            if (gap_len >= 1 && gap_len <= max_gap) {
                for (size_t k = prev_pose + 1; k < i; ++k) {
                    auto& mid = out.frames[k];
                    const double t =
                        static_cast<double>(mid.frame_index - a.frame_index) /
                        static_cast<double>(b.frame_index - a.frame_index);
                    Pose filled;
                    for (int ji = 0; ji < kJointCount; ++ji) {
                        const JointId id = static_cast<JointId>(ji);
                        const Joint& ja = (*a.pose)[id];
                        const Joint& jb = (*b.pose)[id];
                        Joint j;
                        j.pt = {(1.0 - t) * ja.pt.x + t * jb.pt.x,
                                (1.0 - t) * ja.pt.y + t * jb.pt.y};
                        j.confidence = std::min(ja.confidence, jb.confidence);
                        filled[id] = j;
                    }
                    mid.pose = filled;
                }
            }
        }
        prev_pose = i;
    }
    return out;
}

} // namespace nsaqa
