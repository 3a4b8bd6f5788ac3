import init, { analyze_synthetic, response_spectra, classify_matrix, reference_r2_csv } from './pkg/quakespec_wasm.js';

const $ = (id) => document.getElementById(id);
const form = $('synth-form');
let currentSpec = null;

function numbers(text) {
  return text.split(',').map((s) => parseFloat(s)).filter((x) => Number.isFinite(x));
}

function specFromForm() {
  const f = new FormData(form);
  const kind = f.get('kind');
  const spec = { dt: +f.get('dt'), duration: +f.get('dur'), kind };
  const seed = parseInt(f.get('seed'), 10) || 0;
  if (kind === 'sine') {
    spec.frequency = numbers(f.get('f0'))[0];
    spec.amplitude = 1;
  } else if (kind === 'multisine') {
    spec.frequencies = numbers(f.get('f0'));
    spec.amplitudes = spec.frequencies.map(() => 1);
  } else if (kind === 'band_noise') {
    const [lo, hi] = numbers(f.get('band'));
    Object.assign(spec, { f_lo: lo, f_hi: hi, rms: 1, seed });
  } else {
    Object.assign(spec, { natural_frequency: +f.get('fn'), damping: +f.get('zeta'), rms: 1, seed });
  }
  return spec;
}

function showKindFields() {
  const kind = form.elements.kind.value;
  for (const el of form.querySelectorAll('label[class]')) {
    el.style.display = el.classList.contains('k-' + kind) ? '' : 'none';
  }
}

// Line plot; xs optional (defaults to index * dx). Log x axis if opts.logx.
function plot(canvas, series, opts = {}) {
  const ctx = canvas.getContext('2d');
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  const tx = opts.logx ? Math.log10 : (x) => x;
  let x0 = Infinity, x1 = -Infinity, y0 = opts.ymin ?? Infinity, y1 = -Infinity;
  for (const s of series) {
    s.xs.forEach((x, i) => {
      x0 = Math.min(x0, tx(x)); x1 = Math.max(x1, tx(x));
      y0 = Math.min(y0, s.ys[i]); y1 = Math.max(y1, s.ys[i]);
    });
  }
  if (y1 === y0) y1 = y0 + 1;
  const px = (x) => pad + ((tx(x) - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad + ((y0 - y) / (y1 - y0)) * (h - 2 * pad);
  ctx.strokeStyle = '#999';
  ctx.strokeRect(pad, pad / 2, w - 2 * pad, h - 1.5 * pad);
  ctx.fillStyle = '#444';
  ctx.font = '11px sans-serif';
  ctx.fillText(opts.label || '', pad + 4, pad / 2 + 12);
  ctx.fillText(opts.xlabel || '', w - pad - 60, h - 6);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
    ctx.stroke();
  }
  for (const m of opts.marks || []) {
    if (!Number.isFinite(m.x)) continue;
    ctx.strokeStyle = m.color;
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(px(m.x), pad / 2);
    ctx.lineTo(px(m.x), h - pad);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = m.color;
    ctx.fillText(m.text, px(m.x) + 3, pad / 2 + 24);
  }
}

const fmt = (v) => (v == null ? 'n/a' : v.toFixed(3));

function runAnalysis(ev) {
  ev?.preventDefault();
  $('synth-error').textContent = '';
  const spec = specFromForm();
  let out;
  try {
    out = JSON.parse(analyze_synthetic(JSON.stringify(spec), form.elements.hann.checked));
  } catch (e) {
    $('synth-error').textContent = e.message;
    return;
  }
  currentSpec = spec;
  const t = out.samples.map((_, i) => i * out.dt);
  plot($('trace'), [{ xs: t, ys: out.samples, color: '#246' }], { label: 'acceleration (m/s²)', xlabel: 'time (s)' });
  const f = out.psd.ordinates.map((_, i) => i * out.psd.df);
  const p = out.parameters;
  plot($('psd'), [{ xs: f, ys: out.psd.ordinates, color: '#642' }], {
    label: 'periodogram', xlabel: 'frequency (Hz)', ymin: 0,
    marks: [
      { x: 1 / p.t1_dsp, text: 'T1(DSP)', color: '#a22' },
      { x: 1 / p.t_cen, text: 'T_cen', color: '#262' },
    ],
  });
  const names = ['t_ms', 't1_dsp', 't_mean', 't_cen', 't_gsa', 't_gsv', 't_gei', 't_c', 't_43', 'q', 'epsilon'];
  $('params').innerHTML =
    '<tr>' + names.map((n) => `<th>${n}</th>`).join('') + '</tr>' +
    '<tr>' + names.map((n) => `<td>${fmt(p[n])}</td>`).join('') + '</tr>';
  for (const fail of out.failures) $('synth-error').textContent += `${fail.param}: ${fail.reason}. `;
  runSpectra();
}

function runSpectra() {
  if (!currentSpec) return;
  const zeta = +$('damping').value;
  $('damping-value').textContent = zeta.toFixed(2);
  let rs;
  try {
    rs = JSON.parse(response_spectra(JSON.stringify(currentSpec), zeta));
  } catch (e) {
    $('rs-summary').textContent = e.message;
    return;
  }
  const norm = (ys) => { const m = Math.max(...ys) || 1; return ys.map((y) => y / m); };
  plot($('rs'), [
    { xs: rs.periods, ys: norm(rs.sa), color: '#a22' },
    { xs: rs.periods, ys: norm(rs.sv), color: '#22a' },
    { xs: rs.periods, ys: norm(rs.ei), color: '#2a2' },
  ], {
    logx: true, ymin: 0, xlabel: 'period (s)',
    label: 'SA (red), SV (blue), EI (green), each scaled to its peak',
    marks: [{ x: rs.t_gsa, text: 'T_gSA', color: '#a22' }, { x: rs.t_c, text: 'T_C', color: '#555' }],
  });
  $('rs-summary').textContent = `T_gSA = ${fmt(rs.t_gsa)} s, T_gSV = ${fmt(rs.t_gsv)} s, T_C = ${fmt(rs.t_c)} s`;
}

function runClassify() {
  $('classify-error').textContent = '';
  let out;
  try {
    out = JSON.parse(classify_matrix($('matrix').value));
  } catch (e) {
    $('classify-error').textContent = e.message;
    return;
  }
  $('classify-summary').textContent = out.summary;
  $('pairs').innerHTML = '<tr><th>x</th><th>y</th><th>R²</th><th>class</th></tr>' +
    out.pairs.map((p) => `<tr class="${p.class}"><td>${p.x}</td><td>${p.y}</td><td>${p.r2.toFixed(3)}</td><td>${p.class}</td></tr>`).join('');
}

await init();
form.elements.kind.addEventListener('change', showKindFields);
form.addEventListener('submit', runAnalysis);
$('damping').addEventListener('input', runSpectra);
$('classify-btn').addEventListener('click', runClassify);
$('matrix').value = reference_r2_csv();
showKindFields();
runAnalysis();
runClassify();
