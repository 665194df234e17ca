#!/usr/bin/env node
/**
 * emb1-export --input sentences.tsv --model <name|stub:dim> --out vectors.emb1 [--batch 32]
 *
 * Exit codes: 0 success, 1 usage/input error, 2 model load failure,
 * 3 id collision, 4 write failure.
 */

import { realpathSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import { parseArgs } from 'node:util';

import { ModelLoadError } from './encoder.js';
import { exportEmbeddings, IdCollisionError, InputError, WriteError } from './export.js';

const USAGE =
    'usage: emb1-export --input <sentences.tsv> --model <name|stub:dim> --out <file.emb1> [--batch N]';

export async function main(argv: string[]): Promise<number> {
    let values;
    try {
        ({ values } = parseArgs({
            args: argv,
            options: {
                input: { type: 'string' },
                model: { type: 'string' },
                out: { type: 'string' },
                batch: { type: 'string', default: '32' },
                help: { type: 'boolean', default: false },
            },
        }));
    } catch (err) {
        console.error(`error: ${(err as Error).message}`);
        console.error(USAGE);
        return 1;
    }
    if (values.help) {
        console.log(USAGE);
        return 0;
    }
    if (!values.input || !values.model || !values.out) {
        console.error(USAGE);
        return 1;
    }
    try {
        const result = await exportEmbeddings({
            input: values.input,
            model: values.model,
            batch: Number(values.batch),
            out: values.out,
        });
        console.log(`wrote ${result.out}: ${result.count} records, dim ${result.dim}`);
        return 0;
    } catch (err) {
        console.error(`error: ${(err as Error).message}`);
        if (err instanceof ModelLoadError) return 2;
        if (err instanceof IdCollisionError) return 3;
        if (err instanceof WriteError) return 4;
        if (err instanceof InputError) return 1;
        return 1;
    }
}

function isMainModule(): boolean {
    if (!process.argv[1]) return false;
    try {
        return fileURLToPath(import.meta.url) === realpathSync(process.argv[1]);
    } catch {
        return false;
    }
}

if (isMainModule()) {
    main(process.argv.slice(2)).then((code) => {
        process.exitCode = code;
    });
}
