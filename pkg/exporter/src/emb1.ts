/**
 * EMB1 binary embedding format (little-endian):
 *
 *   magic "EMB1" | u32 dim | u64 n | n * [u16 id_len, id utf-8, dim * f32]
 *
 * The layout is normative for the topic-detection pipeline; its loader
 * re-normalizes rows, so vectors may be written as raw model outputs.
 */

export interface Emb1Record {
    id: string;
    vector: Float32Array | number[];
}

const MAGIC = Buffer.from('EMB1', 'ascii');

export function encodeEmb1(dim: number, records: Emb1Record[]): Buffer {
    if (!Number.isInteger(dim) || dim < 2) {
        throw new Error(`EMB1 dim must be an integer >= 2, got ${dim}`);
    }
    const chunks: Buffer[] = [];
    const header = Buffer.alloc(4 + 4 + 8);
    MAGIC.copy(header, 0);
    header.writeUInt32LE(dim, 4);
    header.writeBigUInt64LE(BigInt(records.length), 8);
    chunks.push(header);

    for (const record of records) {
        const idBytes = Buffer.from(record.id, 'utf-8');
        if (idBytes.length > 0xffff) {
            throw new Error(`id too long for EMB1: ${record.id}`);
        }
        if (record.vector.length !== dim) {
            throw new Error(
                `record ${record.id} has ${record.vector.length} floats, header says ${dim}`,
            );
        }
        const head = Buffer.alloc(2);
        head.writeUInt16LE(idBytes.length, 0);
        const floats = Buffer.alloc(4 * dim);
        for (let i = 0; i < dim; i++) {
            floats.writeFloatLE(Number(record.vector[i]), 4 * i);
        }
        chunks.push(head, idBytes, floats);
    }
    return Buffer.concat(chunks);
}

export interface Emb1File {
    dim: number;
    records: Emb1Record[];
}

/** Strict reader used by the tests to verify the byte layout. */
export function decodeEmb1(data: Buffer): Emb1File {
    if (data.length < 16 || !data.subarray(0, 4).equals(MAGIC)) {
        throw new Error('not an EMB1 file (bad magic)');
    }
    const dim = data.readUInt32LE(4);
    const n = Number(data.readBigUInt64LE(8));
    const records: Emb1Record[] = [];
    let offset = 16;
    for (let i = 0; i < n; i++) {
        if (offset + 2 > data.length) throw new Error(`truncated record ${i}`);
        const idLen = data.readUInt16LE(offset);
        offset += 2;
        if (offset + idLen + 4 * dim > data.length) throw new Error(`truncated record ${i}`);
        const id = data.subarray(offset, offset + idLen).toString('utf-8');
        offset += idLen;
        const vector = new Float32Array(dim);
        for (let d = 0; d < dim; d++) {
            vector[d] = data.readFloatLE(offset + 4 * d);
        }
        offset += 4 * dim;
        records.push({ id, vector });
    }
    if (offset !== data.length) {
        throw new Error(`${data.length - offset} trailing bytes after ${n} records`);
    }
    return { dim, records };
}
