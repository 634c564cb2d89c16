#include "uavmap/synth.hpp"

#include <algorithm>
#include <cmath>

#include "rng.hpp"

namespace uavmap {

namespace {

// Deterministic lattice value noise in [0, 1].
double lattice_hash(std::uint64_t seed, long long ix, long long iy) {
  std::uint64_t h = seed;
  h ^= static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ULL;
  h ^= h >> 29;
  h ^= static_cast<std::uint64_t>(iy) * 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 32;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const long long ix = static_cast<long long>(fx), iy = static_cast<long long>(fy);
  const double tx = smoothstep(x - fx), ty = smoothstep(y - fy);
  const double v00 = lattice_hash(seed, ix, iy);
  const double v10 = lattice_hash(seed, ix + 1, iy);
  const double v01 = lattice_hash(seed, ix, iy + 1);
  const double v11 = lattice_hash(seed, ix + 1, iy + 1);
  return (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
}

double fractal_noise(std::uint64_t seed, double x, double y, int octaves, double scale) {
  double amp = 1.0, sum = 0.0, norm = 0.0, freq = 1.0 / scale;
  for (int o = 0; o < octaves; ++o) {
    sum += amp * value_noise(seed + o * 1013ULL, x * freq, y * freq);
    norm += amp;
    amp *= 0.5;
    freq *= 2.0;
  }
  return sum / norm;
}

// Fixed-point ray intersection against the analytic surface.
Eigen::Vector3d intersect_ray_analytic(const SceneSpec& spec, const Eigen::Vector3d& origin,
                                       const Eigen::Vector3d& dir) {
  double z = terrain_height(spec.terrain, origin.x(), origin.y());
  Eigen::Vector3d p = origin;
  for (int i = 0; i < 8; ++i) {
    const double s = (z - origin.z()) / dir.z();
    p = origin + s * dir;
    z = terrain_height(spec.terrain, p.x(), p.y());
  }
  const double s = (z - origin.z()) / dir.z();
  return origin + s * dir;
}

struct DiscretePath {
  std::vector<double> t;
  std::vector<Eigen::Vector3d> p, v, a;
  std::vector<int> frame_ticks;
};

// The mission path is integrated on the IMU tick grid with constant
// acceleration per interval, so a perfect filter reproduces it exactly.
DiscretePath build_path(const SceneSpec& spec) {
  const TrajectorySpec& tr = spec.trajectory;
  const double dt = 1.0 / spec.imu_rate;
  const double leg_duration = tr.row_length / tr.speed;
  const double turn_duration = std::max(tr.row_spacing / tr.speed, 2.0 * dt);
  const int leg_ticks = static_cast<int>(std::lround(leg_duration / dt));
  const int turn_ticks = static_cast<int>(std::lround(turn_duration / dt));

  // Desired velocity per tick: straight legs with cosine-blended u-turns.
  std::vector<Eigen::Vector3d> vel;
  std::vector<int> frame_ticks;
  const int frames_per_leg = static_cast<int>(std::floor(tr.row_length / tr.frame_interval_m)) + 1;
  const int frame_tick_step =
      std::max(1, static_cast<int>(std::lround(tr.frame_interval_m / tr.speed / dt)));

  for (int row = 0; row < tr.rows; ++row) {
    const double dir = (row % 2 == 0) ? 1.0 : -1.0;
    const Eigen::Vector3d v_leg(dir * tr.speed, 0.0, 0.0);
    const int leg_start = static_cast<int>(vel.size());
    for (int i = 0; i < leg_ticks; ++i) {
      vel.push_back(v_leg);
    }
    for (int f = 0; f < frames_per_leg; ++f) {
      const int tick = leg_start + f * frame_tick_step;
      if (tick <= leg_start + leg_ticks) {  // leg endpoint included
        frame_ticks.push_back(tick);
      }
    }
    if (row + 1 < tr.rows) {
      const Eigen::Vector3d v_next(-dir * tr.speed, 0.0, 0.0);
      const Eigen::Vector3d v_cross(0.0, tr.row_spacing / turn_duration, 0.0);
      for (int i = 0; i < turn_ticks; ++i) {
        const double s = (i + 0.5) / turn_ticks;
        const double blend = 0.5 * (1.0 + std::cos(M_PI * s));
        vel.push_back(blend * v_leg + (1.0 - blend) * v_next + v_cross);
      }
    }
  }
  vel.push_back(vel.back());  // terminal sample

  DiscretePath path;
  path.frame_ticks = frame_ticks;
  Eigen::Vector3d p(0.0, 0.0, tr.altitude);
  for (size_t i = 0; i < vel.size(); ++i) {
    path.t.push_back(i * dt);
    path.p.push_back(p);
    path.v.push_back(vel[i]);
    const Eigen::Vector3d acc = (i + 1 < vel.size())
                                    ? Eigen::Vector3d((vel[i + 1] - vel[i]) / dt)
                                    : Eigen::Vector3d(Eigen::Vector3d::Zero());
    path.a.push_back(acc);
    p += vel[i] * dt + 0.5 * acc * dt * dt;
  }
  return path;
}

}  // namespace

double terrain_height(const TerrainSpec& spec, double x, double y) {
  switch (spec.type) {
    case TerrainSpec::Type::Flat:
      return spec.height;
    case TerrainSpec::Type::Ramp:
      return spec.a * x + spec.b * y + spec.c;
    case TerrainSpec::Type::Hill: {
      const double k = 2.0 * M_PI / spec.wavelength;
      return spec.base +
             spec.amplitude * (0.7 * std::sin(k * x) * std::cos(k * y) +
                               0.3 * std::sin(0.37 * k * (x + y) + 1.3));
    }
  }
  return 0.0;
}

Eigen::Vector3d texture_color(const SceneSpec& spec, const std::vector<Eigen::Vector3d>& markers,
                              double x, double y) {
  for (const Eigen::Vector3d& m : markers) {
    if (std::abs(x - m.x()) <= 0.5 * spec.marker_size &&
        std::abs(y - m.y()) <= 0.5 * spec.marker_size) {
      return Eigen::Vector3d(255.0, 255.0, 255.0);
    }
  }
  if (spec.texture.type == TextureSpec::Type::Checker) {
    const long long cx = static_cast<long long>(std::floor(x / spec.texture.period));
    const long long cy = static_cast<long long>(std::floor(y / spec.texture.period));
    return ((cx + cy) & 1) ? Eigen::Vector3d(190.0, 185.0, 172.0)
                           : Eigen::Vector3d(70.0, 78.0, 62.0);
  }
  const double v = fractal_noise(detail::sub_seed(spec.seed, "texture"), x, y,
                                 spec.texture.octaves, spec.texture.scale);
  return Eigen::Vector3d(40.0 + 150.0 * v, 55.0 + 155.0 * v, 35.0 + 120.0 * v);
}

CameraIntrinsics SceneSpec::intrinsics() const {
  const double fx = 0.5 * image_width / std::tan(0.5 * hfov_deg * M_PI / 180.0);
  return CameraIntrinsics(fx, fx, 0.5 * image_width, 0.5 * image_height, image_width,
                          image_height);
}

SceneSpec SceneSpec::road_like() {
  SceneSpec s;
  s.seed = 42;
  s.name = "road-like";
  s.terrain.type = TerrainSpec::Type::Ramp;
  s.terrain.a = 0.049;
  s.terrain.b = 0.0;
  s.terrain.c = 9.68;
  s.texture.type = TextureSpec::Type::Checker;
  s.texture.period = 4.0;
  s.trajectory.rows = 1;
  s.trajectory.row_length = 160.0;
  s.trajectory.frame_interval_m = 8.0;
  s.trajectory.altitude = 70.0;
  return s;  // 21 frames
}

SceneSpec SceneSpec::hill_like() {
  SceneSpec s;
  s.seed = 43;
  s.name = "hill-like";
  s.terrain.type = TerrainSpec::Type::Hill;
  s.terrain.base = 26.5;
  s.terrain.amplitude = 6.8;
  s.terrain.wavelength = 150.0;
  s.texture.type = TextureSpec::Type::Noise;
  s.trajectory.rows = 3;
  s.trajectory.row_length = 144.0;
  s.trajectory.row_spacing = 30.0;
  s.trajectory.frame_interval_m = 8.0;
  s.trajectory.altitude = 85.0;
  return s;  // 3 x 19 frames
}

SceneSpec SceneSpec::bench_road() {
  SceneSpec s = road_like();
  s.name = "bench-road";
  s.image_width = 1920;
  s.image_height = 1080;
  s.render_frames = false;
  return s;
}

SceneData gen_scene(const SceneSpec& spec) {
  SceneData scene;
  scene.spec = spec;

  const DiscretePath path = build_path(spec);
  const double dt = 1.0 / spec.imu_rate;

  // Extrinsics: camera looks down (+Z camera along -Z body/world), radar level.
  const RigidTransform t_camera_body(
      Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX())),
      Eigen::Vector3d(0.08, 0.0, -0.05), Frame::Camera, Frame::Body);
  const RigidTransform t_radar_body(Eigen::Quaterniond::Identity(),
                                    Eigen::Vector3d(-0.10, 0.0, -0.03), Frame::Radar,
                                    Frame::Body);
  scene.gt.t_camera_body = t_camera_body;
  scene.gt.t_radar_body = t_radar_body;

  // Altitude sanity along the whole path.
  for (size_t i = 0; i < path.p.size(); ++i) {
    if (path.p[i].z() - terrain_height(spec.terrain, path.p[i].x(), path.p[i].y()) <= 5.0) {
      throw DataError("gen_scene: trajectory dips below terrain + 5 m margin");
    }
  }

  for (size_t i = 0; i < path.t.size(); ++i) {
    scene.gt.body_trajectory.push_back(
        {path.t[i], RigidTransform(Eigen::Quaterniond::Identity(), path.p[i], Frame::Body,
                                   Frame::World)});
  }

  // Markers spread over the flight strip.
  {
    detail::Rng rng(detail::sub_seed(spec.seed, "markers"));
    Eigen::AlignedBox2d strip;
    for (const auto& p : path.p) {
      strip.extend(Eigen::Vector2d(p.x(), p.y()));
    }
    const double margin = 0.25 * spec.trajectory.altitude;
    strip.min() -= Eigen::Vector2d(margin * 0.5, margin * 0.5);
    strip.max() += Eigen::Vector2d(margin * 0.5, margin * 0.5);
    while (static_cast<int>(scene.gt.markers.size()) < spec.marker_count) {
      const double x = rng.uniform(strip.min().x(), strip.max().x());
      const double y = rng.uniform(strip.min().y(), strip.max().y());
      bool clear = true;
      for (const auto& m : scene.gt.markers) {
        if (std::abs(m.x() - x) < 4 * spec.marker_size &&
            std::abs(m.y() - y) < 4 * spec.marker_size) {
          clear = false;
          break;
        }
      }
      if (clear) {
        scene.gt.markers.emplace_back(x, y, terrain_height(spec.terrain, x, y));
      }
    }
  }

  // IMU stream: specific force consistent with the discrete integration.
  {
    detail::Rng rng(detail::sub_seed(spec.seed, "imu"));
    const double accel_sigma = spec.noise.accel_density / std::sqrt(dt);
    const double gyro_sigma = spec.noise.gyro_density / std::sqrt(dt);
    for (size_t i = 0; i < path.t.size(); ++i) {
      ImuSample s;
      s.t = path.t[i];
      s.accel = path.a[i] - kGravity;
      s.gyro = Eigen::Vector3d::Zero();
      if (spec.noise.accel_density > 0) {
        s.accel += Eigen::Vector3d(rng.gauss(accel_sigma), rng.gauss(accel_sigma),
                                   rng.gauss(accel_sigma));
      }
      if (spec.noise.gyro_density > 0) {
        s.gyro += Eigen::Vector3d(rng.gauss(gyro_sigma), rng.gauss(gyro_sigma),
                                  rng.gauss(gyro_sigma));
      }
      scene.imu.push_back(s);
    }
  }

  // GPS stream.
  {
    detail::Rng rng(detail::sub_seed(spec.seed, "gps"));
    const int step = std::max(1, static_cast<int>(std::lround(spec.imu_rate / spec.gps_rate)));
    for (size_t i = 0; i < path.t.size(); i += step) {
      GpsFix fix;
      fix.t = path.t[i];
      fix.position = path.p[i];
      if (spec.noise.gps_sigma > 0) {
        fix.position += Eigen::Vector3d(rng.gauss(spec.noise.gps_sigma),
                                        rng.gauss(spec.noise.gps_sigma),
                                        rng.gauss(spec.noise.gps_sigma));
      }
      fix.noise = Eigen::Matrix3d::Identity() *
                  std::max(spec.noise.gps_sigma * spec.noise.gps_sigma, 1e-6);
      scene.gps.push_back(fix);
    }
  }

  // Radar stream: true surface points under the platform, in the radar frame.
  {
    detail::Rng rng(detail::sub_seed(spec.seed, "radar"));
    const int step = std::max(1, static_cast<int>(std::lround(spec.imu_rate / spec.radar_rate)));
    for (size_t i = 0; i < path.t.size(); i += step) {
      TimedCloud epoch;
      epoch.t = path.t[i];
      epoch.cloud.frame = Frame::Radar;
      const RigidTransform body(Eigen::Quaterniond::Identity(), path.p[i], Frame::Body,
                                Frame::World);
      const RigidTransform radar_to_world = compose(body, t_radar_body);
      const RigidTransform world_to_radar = invert(radar_to_world);
      for (int n = 0; n < spec.radar_points_per_epoch; ++n) {
        const double r = spec.radar_swath * std::sqrt(rng.uniform());
        const double theta = 2.0 * M_PI * rng.uniform();
        const double noise = spec.noise.radar_sigma > 0 ? rng.gauss(spec.noise.radar_sigma) : 0.0;
        const bool dropped = rng.uniform() < spec.noise.radar_dropout;
        if (dropped) {
          continue;
        }
        const double x = path.p[i].x() + r * std::cos(theta);
        const double y = path.p[i].y() + r * std::sin(theta);
        const Eigen::Vector3d world(x, y, terrain_height(spec.terrain, x, y) + noise);
        epoch.cloud.points.push_back(world_to_radar.apply(world));
      }
      scene.radar.push_back(epoch);
    }
  }

  // Frames: true camera poses; images by per-pixel ray casting.
  {
    detail::Rng rng(detail::sub_seed(spec.seed, "exposure"));
    const CameraIntrinsics k = spec.intrinsics();
    for (size_t f = 0; f < path.frame_ticks.size(); ++f) {
      const int tick = path.frame_ticks[f];
      const RigidTransform body(Eigen::Quaterniond::Identity(), path.p[tick], Frame::Body,
                                Frame::World);
      FrameRecord frame;
      frame.id = "frame_" + std::to_string(1000 + f).substr(1);
      frame.t = path.t[tick];
      frame.pose = compose(body, t_camera_body);
      frame.intrinsics = k;

      const double gain =
          1.0 + spec.noise.exposure_jitter * (2.0 * rng.uniform() - 1.0);
      if (spec.render_frames) {
        frame.image = ImageU8(spec.image_width, spec.image_height, 3);
        for (int v = 0; v < spec.image_height; ++v) {
          for (int u = 0; u < spec.image_width; ++u) {
            const Eigen::Vector3d dir =
                frame.pose.rotation * back_project(k, PixelPoint(u, v), 1.0);
            const Eigen::Vector3d ground =
                intersect_ray_analytic(spec, frame.pose.translation, dir);
            const Eigen::Vector3d rgb =
                gain * texture_color(spec, scene.gt.markers, ground.x(), ground.y());
            for (int c = 0; c < 3; ++c) {
              frame.image.at(u, v, c) =
                  static_cast<std::uint8_t>(std::clamp(std::lround(rgb[c]), 0L, 255L));
            }
          }
        }
      }
      scene.gt.frame_times.push_back(frame.t);
      scene.gt.camera_trajectory.push_back({frame.t, frame.pose});
      scene.frames.push_back(std::move(frame));
    }
  }

  return scene;
}

FeatureTruth gen_feature_truth(const SceneData& scene, int n_features,
                               double descriptor_sigma, double distractor_fraction) {
  if (n_features < 1) {
    throw ConfigError("gen_feature_truth: n_features must be >= 1");
  }
  const SceneSpec& spec = scene.spec;
  const CameraIntrinsics k = spec.intrinsics();
  const int descriptor_length = spec.features.descriptor_length;
  detail::Rng rng(detail::sub_seed(spec.seed, "features"));

  const int n_distract =
      static_cast<int>(std::lround(distractor_fraction * n_features));
  const int true_cap = n_features - n_distract;

  // Covered area: union of the frame footprints on the analytic surface.
  Eigen::AlignedBox2d area;
  for (const FrameRecord& frame : scene.frames) {
    const PixelPoint corners[4] = {{0.0, 0.0},
                                   {k.width - 1.0, 0.0},
                                   {k.width - 1.0, k.height - 1.0},
                                   {0.0, k.height - 1.0}};
    for (const PixelPoint& px : corners) {
      const Eigen::Vector3d dir = frame.pose.rotation * back_project(k, px, 1.0);
      const Eigen::Vector3d hit = intersect_ray_analytic(spec, frame.pose.translation, dir);
      area.extend(Eigen::Vector2d(hit.x(), hit.y()));
    }
  }

  FeatureTruth truth;
  truth.sets.resize(scene.frames.size());
  truth.world_ids.resize(scene.frames.size());
  for (size_t f = 0; f < scene.frames.size(); ++f) {
    truth.sets[f].image_id = scene.frames[f].id;
    truth.sets[f].width = k.width;
    truth.sets[f].height = k.height;
    truth.sets[f].descriptor_length = descriptor_length;
    truth.sets[f].metric = DescriptorMetric::L2;
  }

  auto random_unit = [&]() {
    std::vector<float> d(descriptor_length);
    double norm = 0.0;
    for (float& v : d) {
      v = static_cast<float>(rng.gauss());
      norm += static_cast<double>(v) * v;
    }
    norm = std::sqrt(norm);
    for (float& v : d) {
      v = static_cast<float>(v / norm);
    }
    return d;
  };
  auto perturb = [&](const std::vector<float>& base) {
    std::vector<float> d(base.size());
    double norm = 0.0;
    for (size_t i = 0; i < base.size(); ++i) {
      d[i] = base[i] + static_cast<float>(rng.gauss(descriptor_sigma));
      norm += static_cast<double>(d[i]) * d[i];
    }
    norm = std::sqrt(norm);
    for (float& v : d) {
      v = static_cast<float>(v / norm);
    }
    return d;
  };

  // world point -> (frame, keypoint index) observations
  std::vector<std::vector<std::pair<int, int>>> observations;
  std::vector<int> fill(scene.frames.size(), 0);
  long attempts = 0;
  const long max_attempts = 400L * n_features * static_cast<long>(scene.frames.size());
  while (attempts++ < max_attempts) {
    bool all_full = true;
    for (size_t f = 0; f < scene.frames.size(); ++f) {
      if (fill[f] < true_cap) {
        all_full = false;
        break;
      }
    }
    if (all_full) {
      break;
    }
    const double x = rng.uniform(area.min().x(), area.max().x());
    const double y = rng.uniform(area.min().y(), area.max().y());
    const Eigen::Vector3d world(x, y, terrain_height(spec.terrain, x, y));

    std::vector<int> visible;
    for (size_t f = 0; f < scene.frames.size(); ++f) {
      const Eigen::Vector3d pc =
          scene.frames[f].pose.rotation.conjugate() * (world - scene.frames[f].pose.translation);
      if (pc.z() <= 0.0) {
        continue;
      }
      const double u = k.fx * pc.x() / pc.z() + k.cx;
      const double v = k.fy * pc.y() / pc.z() + k.cy;
      if (u < 0 || u > k.width - 1 || v < 0 || v > k.height - 1) {
        continue;
      }
      visible.push_back(static_cast<int>(f));
    }
    if (visible.size() < 2) {
      continue;
    }
    const std::vector<float> base = random_unit();
    const int world_id = static_cast<int>(observations.size());
    std::vector<std::pair<int, int>> obs;
    for (int f : visible) {
      if (fill[f] >= true_cap) {
        continue;
      }
      const Eigen::Vector3d pc =
          scene.frames[f].pose.rotation.conjugate() * (world - scene.frames[f].pose.translation);
      Keypoint kp;
      kp.position = PixelPoint(k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy);
      const std::vector<float> d = perturb(base);
      truth.sets[f].keypoints.push_back(kp);
      truth.sets[f].descriptors.insert(truth.sets[f].descriptors.end(), d.begin(), d.end());
      truth.world_ids[f].push_back(world_id);
      obs.emplace_back(f, truth.sets[f].size() - 1);
      ++fill[f];
    }
    if (obs.size() < 2) {
      // Rolled back conceptually: the keypoints stay but pair labels need two views.
    }
    observations.push_back(std::move(obs));
  }
  truth.world_point_count = static_cast<int>(observations.size());

  // Distractors with independent descriptors.
  for (size_t f = 0; f < scene.frames.size(); ++f) {
    for (int n = 0; n < n_distract; ++n) {
      Keypoint kp;
      kp.position = PixelPoint(rng.uniform(0, k.width - 1), rng.uniform(0, k.height - 1));
      const std::vector<float> d = random_unit();
      truth.sets[f].keypoints.push_back(kp);
      truth.sets[f].descriptors.insert(truth.sets[f].descriptors.end(), d.begin(), d.end());
      truth.world_ids[f].push_back(-1);
    }
  }

  // Pair labels for every frame pair sharing world points.
  for (const auto& obs : observations) {
    for (size_t i = 0; i < obs.size(); ++i) {
      for (size_t j = i + 1; j < obs.size(); ++j) {
        truth.labels[{obs[i].first, obs[j].first}].emplace_back(obs[i].second, obs[j].second);
      }
    }
  }
  for (auto& [key, pairs] : truth.labels) {
    std::sort(pairs.begin(), pairs.end());
  }
  return truth;
}

}  // namespace uavmap
