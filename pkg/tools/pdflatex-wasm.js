// Headless pdflatex: runs the emscripten pdfTeX build shipped in the
// pdftex.js npm package under node, with no network access.
//
//   node pdflatex-wasm.js INPUT.tex OUTDIR [PDFTEX_JS_DIR]
//
// Writes OUTDIR/input.log and, on success, OUTDIR/input.pdf.
// Exit status: 0 when pdfTeX finished and produced a PDF, 1 otherwise.
'use strict'
const fs = require('fs')
const path = require('path')
const vm = require('vm')

const [input, outdir, given] = process.argv.slice(2)
if (!input || !outdir) {
  process.stderr.write('usage: node pdflatex-wasm.js INPUT.tex OUTDIR [PDFTEX_JS_DIR]\n')
  process.exit(2)
}
const dir = path.resolve(given || path.join(__dirname, 'node_modules', 'pdftex.js'))
const source = fs.readFileSync(input, 'utf8')
const realm = {}

// The worker fetches its .data and .mem files with XHR; serve them from disk.
// Buffers are built with the sandbox's own ArrayBuffer so instanceof checks pass.
class XMLHttpRequest {
  open (_method, url) { this.url = url }
  overrideMimeType () {}
  send () {
    const buf = fs.readFileSync(path.join(dir, path.basename(this.url.split('?')[0])))
    const ab = new realm.ArrayBuffer(buf.length)
    new realm.Uint8Array(ab).set(buf)
    this.status = 200
    this.readyState = 4
    this.response = ab
    setImmediate(() => {
      if (this.onprogress) this.onprogress({ loaded: buf.length, total: buf.length })
      if (this.onreadystatechange) this.onreadystatechange()
      if (this.onload) this.onload({})
    })
  }
}

let listener = null
const sandbox = {
  importScripts () {},
  location: { href: 'file://' + dir + '/', origin: 'file://', pathname: dir + '/' },
  XMLHttpRequest,
  TextDecoder,
  console,
  setTimeout,
  clearTimeout,
  setImmediate,
  Blob: class { constructor (parts) { this.parts = parts } },
  URL: { createObjectURL: () => 'blob:' },
  addEventListener (_type, f) { listener = f },
  postMessage (m) {
    if (m.type === 'log' || m.type === 'err') {
      process.stderr.write(m.value + '\n')
    } else if (m.type === 'ready') {
      listener({ data: { type: 'start', source, options: { enableUrls: false } } })
    } else if (m.type === 'finish') {
      fs.writeFileSync(path.join(outdir, 'input.log'), m.value.log || '')
      if (m.value.success) {
        fs.writeFileSync(path.join(outdir, 'input.pdf'), sandbox.FS.readFile('input.pdf'))
      }
      process.exit(m.value.success ? 0 : 1)
    }
  }
}
sandbox.self = sandbox

const ctx = vm.createContext(sandbox)
realm.ArrayBuffer = vm.runInContext('ArrayBuffer', ctx)
realm.Uint8Array = vm.runInContext('Uint8Array', ctx)
const worker = fs.readFileSync(path.join(dir, 'pdftex-worker.js'), 'utf8')
vm.runInContext(worker + '\n;this.FS = FS;', ctx, { filename: 'pdftex-worker.js' })
