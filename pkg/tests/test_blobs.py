"""Blob store behaviour: signed uploads, integrity, promotion atomicity."""

import pytest

from modeldock.blobs import BlobStore, SignedUploadUrl
from modeldock.canonical import blob_digest
from modeldock.errors import ServiceError


class Clock:
    def __init__(self, start=1_000_000.0):
        self.now = start

    def __call__(self):
        return self.now

    def advance(self, seconds):
        self.now += seconds


@pytest.fixture()
def clock():
    return Clock()


@pytest.fixture()
def store(tmp_path, clock):
    s = BlobStore(tmp_path, signing_secret="test-secret", now_fn=clock)
    s.register_scope("tok-1")
    return s


def put(store, url: SignedUploadUrl, content: bytes) -> str:
    return store.receive_upload(url.scope, url.digest, url.exp, url.sig, content)


def test_upload_then_promote_then_read(store):
    content = b"model weights here"
    digest = blob_digest(content)
    url = store.issue_upload_url("tok-1", digest, ttl_seconds=600)
    assert url.url == f"/blobs/staging/tok-1/{digest}?exp={url.exp}&sig={url.sig}"

    assert put(store, url, content) == digest
    assert store.staged_exists("tok-1", digest)
    assert not store.published_exists(digest)

    store.promote_to_published("tok-1", [digest])
    assert store.published_exists(digest)
    assert not store.staged_exists("tok-1", digest)
    assert store.read_published(digest) == content


def test_digest_mismatch_discards_content(store, tmp_path):
    digest = blob_digest(b"expected bytes")
    url = store.issue_upload_url("tok-1", digest, ttl_seconds=600)
    with pytest.raises(ServiceError) as err:
        put(store, url, b"something else entirely")
    assert err.value.code == "DigestMismatch"
    assert not store.staged_exists("tok-1", digest)
    # nothing left behind, not even a temp file
    scope_dir = tmp_path / "blobs" / "staging" / "tok-1"
    assert not scope_dir.exists() or not list(scope_dir.iterdir())


def test_expired_url_rejected(store, clock):
    content = b"late arrival"
    url = store.issue_upload_url("tok-1", blob_digest(content), ttl_seconds=60)
    clock.advance(61)
    with pytest.raises(ServiceError) as err:
        put(store, url, content)
    assert err.value.code == "Expired"
    assert err.value.status == 403


def test_tampered_signature_rejected(store):
    content = b"payload"
    url = store.issue_upload_url("tok-1", blob_digest(content), ttl_seconds=600)
    bad_sig = ("0" if url.sig[0] != "0" else "1") + url.sig[1:]
    with pytest.raises(ServiceError) as err:
        store.receive_upload(url.scope, url.digest, url.exp, bad_sig, content)
    assert err.value.code == "BadSignature"


def test_tampered_expiry_rejected(store, clock):
    # extending exp without re-signing breaks the signature
    content = b"payload"
    url = store.issue_upload_url("tok-1", blob_digest(content), ttl_seconds=60)
    clock.advance(120)
    with pytest.raises(ServiceError) as err:
        store.receive_upload(url.scope, url.digest, url.exp + 3600, url.sig, content)
    assert err.value.code == "BadSignature"


def test_unknown_scope_rejected(store):
    content = b"payload"
    digest = blob_digest(content)
    with pytest.raises(ServiceError) as err:
        store.issue_upload_url("tok-nope", digest, ttl_seconds=60)
    assert err.value.code == "UnknownScope"

    # a signature minted for an unregistered scope still fails at receive
    url = store.issue_upload_url("tok-1", digest, ttl_seconds=60)
    store.clear_scope("tok-1")
    with pytest.raises(ServiceError) as err:
        put(store, url, content)
    assert err.value.code == "UnknownScope"


def test_reupload_same_content_idempotent(store):
    content = b"same bytes"
    digest = blob_digest(content)
    url = store.issue_upload_url("tok-1", digest, ttl_seconds=600)
    assert put(store, url, content) == digest
    assert put(store, url, content) == digest
    store.promote_to_published("tok-1", [digest])
    assert store.read_published(digest) == content


def test_promote_missing_artifact_names_digests(store):
    present = b"uploaded"
    d_present = blob_digest(present)
    d_absent = blob_digest(b"never sent")
    url = store.issue_upload_url("tok-1", d_present, ttl_seconds=600)
    put(store, url, present)

    with pytest.raises(ServiceError) as err:
        store.promote_to_published("tok-1", [d_present, d_absent])
    assert err.value.code == "MissingArtifact"
    assert d_absent in err.value.details
    # promotion is all-or-nothing: the present blob stayed in staging
    assert store.staged_exists("tok-1", d_present)
    assert not store.published_exists(d_present)


def test_promote_skips_already_published(store):
    content = b"shared artifact"
    digest = blob_digest(content)
    url = store.issue_upload_url("tok-1", digest, ttl_seconds=600)
    put(store, url, content)
    store.promote_to_published("tok-1", [digest])

    # second publisher references the same digest without re-uploading
    store.register_scope("tok-2")
    store.promote_to_published("tok-2", [digest])
    assert store.read_published(digest) == content


def test_promote_clears_scope(store):
    content = b"bytes"
    digest = blob_digest(content)
    url = store.issue_upload_url("tok-1", digest, ttl_seconds=600)
    put(store, url, content)
    store.promote_to_published("tok-1", [digest])
    with pytest.raises(ServiceError) as err:
        store.issue_upload_url("tok-1", digest, ttl_seconds=600)
    assert err.value.code == "UnknownScope"


def test_areas_are_isolated(store):
    content = b"staged only"
    digest = blob_digest(content)
    url = store.issue_upload_url("tok-1", digest, ttl_seconds=600)
    put(store, url, content)
    with pytest.raises(ServiceError) as err:
        store.read_published(digest)
    assert err.value.code == "NotFound"


def test_read_counts_tracked(store):
    content = b"counted"
    digest = blob_digest(content)
    url = store.issue_upload_url("tok-1", digest, ttl_seconds=600)
    put(store, url, content)
    store.promote_to_published("tok-1", [digest])
    assert store.published_read_count == 0
    store.read_published(digest)
    store.read_published(digest)
    assert store.published_read_count == 2


def test_stage_directly_for_service_generated_content(store):
    digest = store.stage_directly("tok-1", b'{"model_name":"m"}')
    assert store.staged_exists("tok-1", digest)
    store.promote_to_published("tok-1", [digest])
    assert store.read_published(digest) == b'{"model_name":"m"}'


def test_malformed_scope_and_digest_rejected(store):
    with pytest.raises(ServiceError):
        store.issue_upload_url("../escape", "sha256:" + "0" * 64, ttl_seconds=60)
    with pytest.raises(ServiceError) as err:
        store.issue_upload_url("tok-1", "md5:nope", ttl_seconds=60)
    assert err.value.code == "DigestMismatch"
    assert not store.published_exists("not-a-digest")
