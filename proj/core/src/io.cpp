#include "uavmap/io.hpp"

#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace uavmap {

namespace {

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) {
    throw DataError("cannot open for reading: " + path);
  }
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) {
    throw DataError("cannot open for writing: " + path);
  }
  return out;
}

bool starts_numeric(const std::string& line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') continue;
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }
  return false;
}

std::vector<double> parse_csv_row(const std::string& line, size_t expected_min,
                                  const std::string& path) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw DataError("bad numeric field '" + tok + "' in " + path);
    }
  }
  if (out.size() < expected_min) {
    throw DataError("too few fields in row of " + path);
  }
  return out;
}

// Applies fn to each data row (header skipped if non-numeric).
template <typename Fn>
void for_each_csv_row(const std::string& path, size_t min_fields, Fn&& fn) {
  std::ifstream in = open_in(path);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (first && !starts_numeric(line)) {
      first = false;
      continue;  // header
    }
    first = false;
    fn(parse_csv_row(line, min_fields, path));
  }
}

void check_stream_sorted(const std::vector<double>& ts, const std::string& path) {
  for (size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) {
      throw DataError("timestamps not strictly increasing in " + path);
    }
  }
}

}  // namespace

std::vector<ImuSample> read_imu_csv(const std::string& path) {
  std::vector<ImuSample> out;
  std::vector<double> ts;
  for_each_csv_row(path, 7, [&](const std::vector<double>& f) {
    ImuSample s;
    s.t = f[0];
    s.accel = Eigen::Vector3d(f[1], f[2], f[3]);
    s.gyro = Eigen::Vector3d(f[4], f[5], f[6]);
    out.push_back(s);
    ts.push_back(s.t);
  });
  check_stream_sorted(ts, path);
  return out;
}

void write_imu_csv(const std::string& path, const std::vector<ImuSample>& samples) {
  std::ofstream out = open_out(path);
  out << "t,ax,ay,az,gx,gy,gz\n";
  out.precision(12);
  for (const ImuSample& s : samples) {
    out << s.t << ',' << s.accel.x() << ',' << s.accel.y() << ',' << s.accel.z() << ','
        << s.gyro.x() << ',' << s.gyro.y() << ',' << s.gyro.z() << '\n';
  }
}

std::vector<GpsFix> read_gps_csv(const std::string& path) {
  std::vector<GpsFix> out;
  std::vector<double> ts;
  for_each_csv_row(path, 7, [&](const std::vector<double>& f) {
    GpsFix fix;
    fix.t = f[0];
    fix.position = Eigen::Vector3d(f[1], f[2], f[3]);
    fix.noise = Eigen::Vector3d(f[4], f[5], f[6]).asDiagonal();
    out.push_back(fix);
    ts.push_back(fix.t);
  });
  check_stream_sorted(ts, path);
  return out;
}

void write_gps_csv(const std::string& path, const std::vector<GpsFix>& fixes) {
  std::ofstream out = open_out(path);
  out << "t,x,y,z,sxx,syy,szz\n";
  out.precision(12);
  for (const GpsFix& f : fixes) {
    out << f.t << ',' << f.position.x() << ',' << f.position.y() << ',' << f.position.z()
        << ',' << f.noise(0, 0) << ',' << f.noise(1, 1) << ',' << f.noise(2, 2) << '\n';
  }
}

Trajectory read_tum(const std::string& path, Frame from, Frame to) {
  std::ifstream in = open_in(path);
  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::stringstream ss(line);
    double t, x, y, z, qx, qy, qz, qw;
    if (!(ss >> t >> x >> y >> z >> qx >> qy >> qz >> qw)) {
      throw DataError("bad TUM line in " + path + ": " + line);
    }
    traj.push_back({t, RigidTransform(Eigen::Quaterniond(qw, qx, qy, qz),
                                      Eigen::Vector3d(x, y, z), from, to)});
  }
  check_time_sorted(traj, path.c_str());
  return traj;
}

void write_tum(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  out.precision(9);
  for (const TimedPose& p : traj) {
    const Eigen::Quaterniond& q = p.pose.rotation;
    out << p.t << ' ' << p.pose.translation.x() << ' ' << p.pose.translation.y() << ' '
        << p.pose.translation.z() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z() << ' '
        << q.w() << '\n';
  }
}

PointCloud read_cloud_csv(const std::string& path, Frame frame) {
  PointCloud cloud;
  cloud.frame = frame;
  for_each_csv_row(path, 3, [&](const std::vector<double>& f) {
    cloud.points.emplace_back(f[0], f[1], f[2]);
    if (f.size() >= 4) {
      cloud.intensities.push_back(static_cast<float>(f[3]));
    }
  });
  if (!cloud.intensities.empty() && cloud.intensities.size() != cloud.points.size()) {
    throw DataError("inconsistent intensity column in " + path);
  }
  return cloud;
}

void write_cloud_csv(const std::string& path, const PointCloud& cloud) {
  std::ofstream out = open_out(path);
  const bool with_intensity = cloud.intensities.size() == cloud.points.size();
  out << (with_intensity ? "x,y,z,intensity\n" : "x,y,z\n");
  out.precision(12);
  for (size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    out << p.x() << ',' << p.y() << ',' << p.z();
    if (with_intensity) {
      out << ',' << cloud.intensities[i];
    }
    out << '\n';
  }
}

PointCloud read_cloud_rpc1(const std::string& path, Frame frame) {
  std::ifstream in = open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RPC1", 4) != 0) {
    throw DataError("not an RPC1 point cloud: " + path);
  }
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  PointCloud cloud;
  cloud.frame = frame;
  cloud.points.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    double xyz[3];
    in.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
    if (!in) {
      throw DataError("truncated RPC1 point cloud: " + path);
    }
    cloud.points[i] = Eigen::Vector3d(xyz[0], xyz[1], xyz[2]);
  }
  return cloud;
}

void write_cloud_rpc1(const std::string& path, const PointCloud& cloud) {
  std::ofstream out = open_out(path, true);
  out.write("RPC1", 4);
  const std::uint64_t count = cloud.points.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& p : cloud.points) {
    const double xyz[3] = {p.x(), p.y(), p.z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
  }
}

TerrainGrid read_esri_grid(const std::string& path) {
  std::ifstream in = open_in(path);
  TerrainGrid grid;
  double nodata = -9999.0;
  std::string key;
  // Six header lines: ncols nrows xllcorner yllcorner cellsize NODATA_value.
  for (int i = 0; i < 6; ++i) {
    double value;
    if (!(in >> key >> value)) {
      throw DataError("bad ESRI grid header in " + path);
    }
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (key == "ncols") grid.cols = static_cast<int>(value);
    else if (key == "nrows") grid.rows = static_cast<int>(value);
    else if (key == "xllcorner") grid.origin.x() = value;
    else if (key == "yllcorner") grid.origin.y() = value;
    else if (key == "cellsize") grid.cell_size = value;
    else if (key == "nodata_value") nodata = value;
    else throw DataError("unknown ESRI grid header key '" + key + "' in " + path);
  }
  if (grid.cols <= 0 || grid.rows <= 0 || grid.cell_size <= 0) {
    throw DataError("invalid ESRI grid dimensions in " + path);
  }
  grid.heights.assign(static_cast<size_t>(grid.cols) * grid.rows, 0.0);
  grid.valid.assign(grid.heights.size(), 0);
  // Data rows run north to south: file row 0 is our top row (max y).
  for (int r = grid.rows - 1; r >= 0; --r) {
    for (int c = 0; c < grid.cols; ++c) {
      double v;
      if (!(in >> v)) {
        throw DataError("truncated ESRI grid data in " + path);
      }
      if (v != nodata) {
        grid.heights[grid.index(c, r)] = v;
        grid.valid[grid.index(c, r)] = 1;
      }
    }
  }
  return grid;
}

void write_esri_grid(const std::string& path, const TerrainGrid& grid) {
  std::ofstream out = open_out(path);
  out << "ncols " << grid.cols << "\n";
  out << "nrows " << grid.rows << "\n";
  out.precision(12);
  out << "xllcorner " << grid.origin.x() << "\n";
  out << "yllcorner " << grid.origin.y() << "\n";
  out << "cellsize " << grid.cell_size << "\n";
  out << "NODATA_value -9999\n";
  for (int r = grid.rows - 1; r >= 0; --r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c) out << ' ';
      if (grid.valid_at(c, r)) {
        out << grid.height_at(c, r);
      } else {
        out << "-9999";
      }
    }
    out << '\n';
  }
}

FeatureSet read_features(const std::string& path) {
  std::ifstream in = open_in(path, true);
  std::string header;
  std::getline(in, header);
  std::stringstream ss(header);
  std::string magic, metric;
  FeatureSet set;
  std::uint64_t count = 0;
  if (!(ss >> magic >> set.image_id >> count >> set.descriptor_length >> metric >> set.width >>
        set.height) ||
      magic != "UFS1") {
    throw DataError("bad feature-set header in " + path);
  }
  if (metric == "L2") set.metric = DescriptorMetric::L2;
  else if (metric == "HAM") set.metric = DescriptorMetric::Hamming;
  else throw DataError("unknown descriptor metric '" + metric + "' in " + path);

  set.keypoints.resize(count);
  set.descriptors.resize(count * static_cast<size_t>(set.descriptor_length));
  for (std::uint64_t i = 0; i < count; ++i) {
    double xy[2];
    float response;
    in.read(reinterpret_cast<char*>(xy), sizeof(xy));
    in.read(reinterpret_cast<char*>(&response), sizeof(response));
    in.read(reinterpret_cast<char*>(set.descriptor(static_cast<int>(i))),
            sizeof(float) * set.descriptor_length);
    if (!in) {
      throw DataError("truncated feature set: " + path);
    }
    set.keypoints[i].position = PixelPoint(xy[0], xy[1]);
    set.keypoints[i].response = response;
  }
  return set;
}

void write_features(const std::string& path, const FeatureSet& set) {
  std::ofstream out = open_out(path, true);
  out << "UFS1 " << (set.image_id.empty() ? "-" : set.image_id) << ' ' << set.keypoints.size()
      << ' ' << set.descriptor_length << ' '
      << (set.metric == DescriptorMetric::L2 ? "L2" : "HAM") << ' ' << set.width << ' '
      << set.height << '\n';
  for (int i = 0; i < set.size(); ++i) {
    const double xy[2] = {set.keypoints[i].position.x(), set.keypoints[i].position.y()};
    out.write(reinterpret_cast<const char*>(xy), sizeof(xy));
    out.write(reinterpret_cast<const char*>(&set.keypoints[i].response), sizeof(float));
    out.write(reinterpret_cast<const char*>(set.descriptor(i)),
              sizeof(float) * set.descriptor_length);
  }
}

std::vector<MatchPair> read_matches_csv(const std::string& path) {
  std::vector<MatchPair> out;
  for_each_csv_row(path, 3, [&](const std::vector<double>& f) {
    out.push_back({static_cast<int>(f[0]), static_cast<int>(f[1]), f[2]});
  });
  return out;
}

void write_matches_csv(const std::string& path, const std::vector<MatchPair>& matches) {
  std::ofstream out = open_out(path);
  out << "idx_a,idx_b,distance\n";
  out.precision(12);
  for (const MatchPair& m : matches) {
    out << m.index_a << ',' << m.index_b << ',' << m.distance << '\n';
  }
}

void write_world_file(const std::string& path, double gsd, double top_left_center_x,
                      double top_left_center_y) {
  std::ofstream out = open_out(path);
  out.precision(12);
  out << gsd << "\n0\n0\n" << -gsd << "\n" << top_left_center_x << "\n"
      << top_left_center_y << "\n";
}

}  // namespace uavmap
