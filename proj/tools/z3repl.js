#!/usr/bin/env node
// SMT-LIB 2 read-eval-print loop backed by the z3 WebAssembly build from the
// z3-solver npm package. Each input line is a batch of SMT-LIB commands; the
// driver terminates every batch with (echo "...") and reads up to the echoed
// sentinel, so no extra framing is needed here.

const readline = require('readline');

async function main() {
  let initFn;
  try {
    initFn = require('z3-solver').init;
  } catch (e) {
    process.stderr.write('z3repl: cannot load the z3-solver npm package: ' + e.message + '\n');
    process.stderr.write('z3repl: run "npm install" in the repository root\n');
    process.exit(3);
  }
  const { Z3 } = await initFn();
  const ctx = Z3.mk_context(Z3.mk_config());

  const rl = readline.createInterface({ input: process.stdin, terminal: false });
  const queue = [];
  let busy = false;

  async function pump() {
    if (busy) return;
    busy = true;
    while (queue.length > 0) {
      const line = queue.shift();
      if (line.trim().length === 0) continue;
      let out;
      try {
        out = await Z3.eval_smtlib2_string(ctx, line);
      } catch (e) {
        out = '(error "' + String(e.message || e).replace(/"/g, "'") + '")\n';
      }
      if (out && out.length > 0) process.stdout.write(out);
    }
    busy = false;
  }

  rl.on('line', (line) => {
    queue.push(line);
    pump();
  });
  rl.on('close', () => {
    process.exit(0);
  });
}

main();
