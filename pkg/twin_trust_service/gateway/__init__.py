from .chain_client import ConfigCache, HttpChainClient, LocalChainClient
from .coap import Code, TwinMessage, TwinMessageClient, TwinMessageServer
from .credentials import CredentialVerifier, TrusteeCredential
from .twin import TALK_TO_BC, TALK_TO_DT, TALK_TO_THIRD_PARTY, TwinInstance, start_twin
from .views import DataViewPayload, render_view, select_samples
