"""Compare kaleidoscope-image features against a one-hot baseline.

A synthetic dataset implants one short motif per class into otherwise
random sequences. Each sequence is rendered to an image, block-averaged
pixels feed a k-nearest-neighbor classifier, and a one-hot encoding of
the raw residues feeds multinomial logistic regression. Both are scored
on the same seeded stratified split.

Run from the repository root (takes about half a minute):

    python3 demos/classification_pipeline.py
"""

from dance import (
    FeatureMatrix,
    FeatureVector,
    LogRegConfig,
    SplitSpec,
    classification_metrics,
    generate_kaleidoscope,
    knn_fit,
    knn_predict,
    logreg_predict,
    logreg_train,
    manifest_from_sequences,
    ohe_encode,
    pixels_features,
    rasterize,
    stratified_split,
    synth_dataset,
)


def split_matrices(vectors, manifest):
    """Build (train, test) feature matrices following the manifest split."""
    label_of = {e.id: e.label for e in manifest.entries}
    split_of = {e.id: e.split for e in manifest.entries}
    out = {}
    for part in ("train", "test"):
        vecs = [v for v in vectors if split_of[v.source_id] == part]
        labels = [label_of[v.source_id] for v in vecs]
        out[part] = FeatureMatrix.from_vectors(vecs, labels, manifest.class_names)
    return out["train"], out["test"]


def main():
    sequences = synth_dataset(4, 50, (5, 5), 4, seed=7)
    labels = {s.id: s.id.rsplit("_", 1)[0] for s in sequences}
    manifest = stratified_split(
        manifest_from_sequences(sequences, labels), SplitSpec(0.2, seed=0)
    )
    n_test = sum(e.split == "test" for e in manifest.entries)
    print(f"{len(sequences)} sequences, 4 classes, {n_test} held out for test")

    pixel_vecs = []
    for seq in sequences:
        img = rasterize(generate_kaleidoscope(seq))
        pf = pixels_features(img, downsample=10)
        pixel_vecs.append(FeatureVector(pf.values, seq.id, pf.schema))
    train, test = split_matrices(pixel_vecs, manifest)
    knn_preds = knn_predict(knn_fit(train, k=5), test)

    max_len = max(len(s.residues) for s in sequences)
    ohe_vecs = [ohe_encode(s, max_len) for s in sequences]
    train, test = split_matrices(ohe_vecs, manifest)
    model = logreg_train(train, LogRegConfig())
    logreg_preds = logreg_predict(model, test)

    print()
    print(classification_metrics(knn_preds).to_table("image + kNN"))
    print()
    print(classification_metrics(logreg_preds).to_table("one-hot + logreg"))


if __name__ == "__main__":
    main()
