// Canvas front end for the wasm exhibits. Build the wasm package first:
//   wasm-pack build crates/demo-web --target web --out-dir www/pkg
// then serve crates/demo-web/www with any static file server.

import init, { BumpDemo, HeadingDemo, RaceDemo } from "./pkg/mcan_demo.js";

const $ = (id) => document.getElementById(id);

function drawHeatmap(canvas, activity, side) {
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(side, side);
  for (let i = 0; i < side * side; i++) {
    const v = activity[i];
    // dark blue -> cyan -> white ramp
    img.data[4 * i] = Math.round(255 * Math.pow(v, 1.6));
    img.data[4 * i + 1] = Math.round(255 * Math.pow(v, 0.9));
    img.data[4 * i + 2] = Math.round(60 + 195 * Math.pow(v, 0.5));
    img.data[4 * i + 3] = 255;
  }
  // draw via an offscreen canvas so we can scale with nearest-neighbour
  const off = new OffscreenCanvas(side, side);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
}

async function main() {
  await init();

  // ---- exhibit 1: bump playground -----------------------------------
  const bumpSide = 80;
  let bump = new BumpDemo(bumpSide, 3, 10, 1.0, 1e-4);
  const bumpParams = () => {
    const a = Number($("bump-a").value);
    const e = Number($("bump-e").value);
    const gamma = Number($("bump-gamma").value);
    const phi = Math.pow(10, Number($("bump-phi").value));
    $("bump-a-out").textContent = a;
    $("bump-e-out").textContent = e;
    $("bump-gamma-out").textContent = gamma.toFixed(2);
    $("bump-phi-out").textContent = phi.toExponential(1);
    bump.set_params(a, e, gamma, phi);
  };
  for (const id of ["bump-a", "bump-e", "bump-gamma", "bump-phi"]) {
    $(id).addEventListener("input", bumpParams);
  }
  $("bump-reset").addEventListener("click", () => bump.reset());
  bumpParams();

  // ---- exhibit 2: heading ring ---------------------------------------
  const ring = new HeadingDemo();
  $("ring-omega").addEventListener("input", () => {
    $("ring-omega-out").textContent = `${Number($("ring-omega").value).toFixed(1)}°/tick`;
  });

  function drawRing() {
    const canvas = $("ring-canvas");
    const ctx = canvas.getContext("2d");
    const cx = canvas.width / 2;
    const cy = canvas.height / 2;
    const rOut = 140;
    const rIn = 110;
    const act = ring.ring_activity();
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    for (let d = 0; d < 360; d++) {
      const a0 = ((d - 90) * Math.PI) / 180;
      const a1 = ((d + 1 - 90) * Math.PI) / 180;
      const v = act[d];
      ctx.beginPath();
      ctx.arc(cx, cy, rOut, a0, a1);
      ctx.arc(cx, cy, rIn, a1, a0, true);
      ctx.closePath();
      ctx.fillStyle = `rgb(${Math.round(255 * v)}, ${Math.round(180 * v)}, ${Math.round(60 + 180 * v)})`;
      ctx.fill();
    }
    const needle = (deg, color, len) => {
      const a = ((deg - 90) * Math.PI) / 180;
      ctx.beginPath();
      ctx.moveTo(cx, cy);
      ctx.lineTo(cx + len * Math.cos(a), cy + len * Math.sin(a));
      ctx.strokeStyle = color;
      ctx.lineWidth = 3;
      ctx.stroke();
    };
    needle(ring.truth_deg(), "#5a6270", 100);
    needle(ring.heading_deg(), "#7fd1ff", 104);
    $("ring-decoded").textContent = `${ring.heading_deg().toFixed(1)}°`;
    $("ring-truth").textContent = `${ring.truth_deg().toFixed(1)}°`;
    let err = Math.abs(ring.heading_deg() - ring.truth_deg());
    err = Math.min(err, 360 - err);
    $("ring-error").textContent = `${err.toFixed(2)}°`;
  }

  // ---- exhibit 3: tracking race ---------------------------------------
  let race = new RaceDemo(1, 20);
  let racePaused = false;
  const restartRace = () => {
    race = new RaceDemo(Number($("race-seed").value) >>> 0, Number($("race-vmax").value));
    $("race-vmax-out").textContent = `${$("race-vmax").value} m/s`;
  };
  $("race-restart").addEventListener("click", restartRace);
  $("race-vmax").addEventListener("input", restartRace);
  $("race-pause").addEventListener("click", () => {
    racePaused = !racePaused;
    $("race-pause").textContent = racePaused ? "resume" : "pause";
  });

  function drawRace() {
    const canvas = $("race-canvas");
    const ctx = canvas.getContext("2d");
    ctx.fillStyle = "#000";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    const truth = race.trail_truth();
    if (truth.length < 4) return;
    const multi = race.trail_multi();
    const single = race.trail_single();
    let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
    for (let i = 0; i < truth.length; i += 2) {
      minX = Math.min(minX, truth[i]); maxX = Math.max(maxX, truth[i]);
      minY = Math.min(minY, truth[i + 1]); maxY = Math.max(maxY, truth[i + 1]);
    }
    const span = Math.max(maxX - minX, maxY - minY, 50);
    const scale = (canvas.width - 40) / span;
    const toPx = (x, y) => [20 + (x - minX) * scale, canvas.height - 20 - (y - minY) * scale];
    const drawTrail = (pts, color) => {
      ctx.beginPath();
      for (let i = 0; i < pts.length; i += 2) {
        const [px, py] = toPx(pts[i], pts[i + 1]);
        if (i === 0) ctx.moveTo(px, py); else ctx.lineTo(px, py);
      }
      ctx.strokeStyle = color;
      ctx.lineWidth = 1.5;
      ctx.stroke();
    };
    drawTrail(single, "#ff9180");
    drawTrail(multi, "#8bffa8");
    drawTrail(truth, "#e8e8e8");
    $("race-speed").textContent = race.speed().toFixed(1);
    $("race-scale").textContent = race.selected_scale().toFixed(2);
    $("race-rms-multi").textContent = race.rms_multi().toFixed(1);
    $("race-rms-single").textContent = race.rms_single().toFixed(1);
    const side = race.sheet_side();
    for (let s = 0; s < race.sheet_count() && s < 4; s++) {
      drawHeatmap($(`sheet-${s}`), race.sheet_activity(s), side);
    }
  }

  // ---- animation loop --------------------------------------------------
  function frame() {
    bump.step(Number($("bump-vx").value), Number($("bump-vy").value));
    $("bump-vx-out").textContent = Number($("bump-vx").value).toFixed(1);
    $("bump-vy-out").textContent = Number($("bump-vy").value).toFixed(1);
    drawHeatmap($("bump-canvas"), bump.activity(), bumpSide);
    $("bump-decoded").textContent = `(${bump.decoded_x().toFixed(1)}, ${bump.decoded_y().toFixed(1)})`;
    $("bump-faults").textContent = bump.faults();

    ring.step(Number($("ring-omega").value));
    drawRing();

    if (!racePaused) {
      race.step();
      drawRace();
    }
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

main();
